#pragma once

#include <array>
#include <memory>
#include <vector>

#include "helmfosls/mesh.hpp"
#include "helmfosls/types.hpp"

namespace helmfosls {

struct ElementGeometry {
  Vec2 v0;
  Eigen::Matrix2d J;     // [v1-v0, v2-v0]
  Eigen::Matrix2d Jinv;
  Real detJ;             // = 2*area > 0
};
ElementGeometry element_geometry(const Triangulation& mesh, int t);

// reference lattice data for continuous Lagrange elements; basis is built on
// Bernstein polynomials for affine invariance
struct LagrangeReference {
  int p;
  int n_nodes;
  std::vector<std::array<int, 3>> lattice;  // barycentric lattice multi-indices, |.| = p
  struct NodeEntity {
    int kind;  // 0 vertex, 1 edge, 2 interior
    int which; // local vertex / local edge / interior counter
    int slot;  // edge: 1..p-1 measured from local edge start (= vertex (which+1)%3)
  };
  std::vector<NodeEntity> entity;
  MatrixXr bernstein_coeff;  // column i: Bernstein coefficients of nodal basis i

  // basis values / barycentric derivatives at barycentric points, (n_nodes x npts)
  void eval(const Eigen::Matrix3Xd& bary, MatrixXr& vals) const;
  void eval_grad(const Eigen::Matrix3Xd& bary, std::array<MatrixXr, 3>& dldl) const;
};
const LagrangeReference& lagrange_reference(int p);

class LagrangeSpace {
 public:
  const Triangulation* mesh;
  int p;
  int dim;
  int n_edge_dofs;  // per edge: p-1

  struct DofEntity {
    int kind;  // 0 vertex, 1 edge, 2 triangle
    int id;
  };
  std::vector<DofEntity> dof_entity;
  std::vector<std::vector<int>> elem_dofs;  // global dof per local node

  LagrangeSpace(const Triangulation& mesh, int p);

  // basis values and physical gradients on element t at reference points
  void eval_basis(int t, const Eigen::Matrix2Xd& ref_pts, MatrixXr& vals) const;
  void eval_basis(int t, const Eigen::Matrix2Xd& ref_pts, MatrixXr& vals, MatrixXr& gx,
                  MatrixXr& gy) const;

  // triangles supporting each global dof (for scaling factors)
  std::vector<std::vector<int>> dof_support() const;
};

// Raviart-Thomas space with normal-trace degree pt: edge dofs are normal
// components at pt+1 Gauss points per edge (global low->high orientation),
// interior dofs are moments against (P_{pt-1})^2. Built element by element in
// a centroid-centered frame scaled by h_K = sqrt(2 area).
class RaviartThomasSpace {
 public:
  const Triangulation* mesh;
  int pt;
  int ndof_edge;  // pt+1
  int ndof_int;   // pt(pt+1)
  int nloc;       // (pt+1)(pt+3)
  int dim;

  struct Element {
    Vec2 c;
    Real h;
    MatrixXr coeff;  // n_gen x nloc
  };
  std::vector<Element> elements;
  std::vector<std::vector<int>> elem_dofs;

  RaviartThomasSpace(const Triangulation& mesh, int pt);

  // values and divergence of all local basis fields at physical points
  void eval(int t, const Eigen::Matrix2Xd& phys_pts, MatrixXr& vx, MatrixXr& vy,
            MatrixXr& dv) const;

  int edge_dof(int edge, int j) const { return edge * ndof_edge + j; }
  int interior_dof(int t, int j) const {
    return mesh->n_edges() * ndof_edge + t * ndof_int + j;
  }
};

// Test space (S_pt x RT_pt) with the boundary conditions built in:
// scalar dofs on Dirichlet entities and flux edge dofs on Neumann/Robin edges
// are eliminated; on Robin edges the flux trace is slaved to -i times the
// scalar trace. Columns of Xi expand constrained coefficients to the
// unconstrained product space (scalar dofs first, then flux dofs).
class ConstrainedTestSpace {
 public:
  std::shared_ptr<const LagrangeSpace> scalar;
  std::shared_ptr<const RaviartThomasSpace> flux;
  int n_unconstrained;
  int dim;
  std::vector<int> kept;        // unconstrained ids, ascending
  std::vector<int> kept_index;  // inverse of kept, -1 if eliminated
  SparseXc Xi;

  int flux_offset() const { return scalar->dim; }
};
ConstrainedTestSpace build_test_space(const Triangulation& mesh, int p_tilde);

// Trial basis (S_p)^3 for (phi, u_x, u_y), each scalar basis function scaled by
// s_i = h_i^{-1} with h_i^2 = sum of 2*area over the supporting triangles.
// Trial dof id = comp * scalar->dim + i.
class RescaledTrialBasis {
 public:
  std::shared_ptr<const LagrangeSpace> scalar;
  VectorXr scale;
  int dim;
};
RescaledTrialBasis build_trial_basis(const Triangulation& mesh, int p);

// (eta, v) and B'(eta, v) = (-eta - div v / kappa, grad eta / kappa - v)
// evaluated at reference points of element t
struct BAdjointValues {
  VectorXc eta;
  Eigen::Matrix2Xcd v;
  VectorXc s;           // scalar component of the adjoint field
  Eigen::Matrix2Xcd w;  // vector component
};
BAdjointValues evaluate_B_adjoint(const ConstrainedTestSpace& V, const VectorXc& coeffs,
                                  Real kappa, int t, const Eigen::Matrix2Xd& ref_pts);
BAdjointValues evaluate_B_adjoint_unconstrained(const LagrangeSpace& sc,
                                                const RaviartThomasSpace& fl,
                                                const VectorXc& unconstrained, Real kappa,
                                                int t, const Eigen::Matrix2Xd& ref_pts);

}  // namespace helmfosls
