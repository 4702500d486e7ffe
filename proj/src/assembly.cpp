#include "helmfosls/assembly.hpp"

#include <cmath>

#include "helmfosls/linalg.hpp"
#include "helmfosls/quadrature.hpp"

namespace helmfosls {

namespace {

// B' applied to every local unconstrained test basis function at the volume
// quadrature points: rows stacked [scalar basis; flux basis]
struct LocalAdjoint {
  MatrixXr s, wx, wy;  // nloc_total x nq
  MatrixXr eta, vx, vy;  // raw component values, same layout
};

LocalAdjoint local_adjoint_rows(const LagrangeSpace& sc, const RaviartThomasSpace& fl, Real kappa,
                                int t, const QuadratureRule& rule, const ElementGeometry& g) {
  const int nq = static_cast<int>(rule.points.cols());
  MatrixXr vals, gx, gy;
  sc.eval_basis(t, rule.points, vals, gx, gy);
  Eigen::Matrix2Xd phys(2, nq);
  for (int q = 0; q < nq; ++q) phys.col(q) = g.v0 + g.J * rule.points.col(q);
  MatrixXr fvx, fvy, fdv;
  fl.eval(t, phys, fvx, fvy, fdv);

  const int nls = static_cast<int>(vals.rows());
  const int nlf = static_cast<int>(fvx.rows());
  LocalAdjoint L;
  L.s.resize(nls + nlf, nq);
  L.wx.resize(nls + nlf, nq);
  L.wy.resize(nls + nlf, nq);
  L.eta = MatrixXr::Zero(nls + nlf, nq);
  L.vx = MatrixXr::Zero(nls + nlf, nq);
  L.vy = MatrixXr::Zero(nls + nlf, nq);
  L.s.topRows(nls) = -vals;
  L.wx.topRows(nls) = gx / kappa;
  L.wy.topRows(nls) = gy / kappa;
  L.eta.topRows(nls) = vals;
  L.s.bottomRows(nlf) = -fdv / kappa;
  L.wx.bottomRows(nlf) = -fvx;
  L.wy.bottomRows(nlf) = -fvy;
  L.vx.bottomRows(nlf) = fvx;
  L.vy.bottomRows(nlf) = fvy;
  return L;
}

// global unconstrained test ids for the stacked local rows
std::vector<int> local_test_ids(const LagrangeSpace& sc, const RaviartThomasSpace& fl, int t) {
  std::vector<int> ids(sc.elem_dofs[t]);
  ids.reserve(ids.size() + fl.elem_dofs[t].size());
  for (int d : fl.elem_dofs[t]) ids.push_back(sc.dim + d);
  return ids;
}

VectorXc assemble_q_unconstrained(const ConstrainedTestSpace& V, const ProblemData& data,
                                  int level) {
  const Triangulation& mesh = *V.scalar->mesh;
  const int pt = V.scalar->p;
  const Real kappa = data.kappa;
  VectorXc qhat = VectorXc::Zero(V.n_unconstrained);

  const int base = 2 * pt + 2;
  const int mult = 1 << level;
  if (data.f1 || data.f2) {
    QuadratureRule rule = triangle_quadrature(base * mult);
    const int nq = static_cast<int>(rule.points.cols());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      ElementGeometry g = element_geometry(mesh, t);
      LocalAdjoint L = local_adjoint_rows(*V.scalar, *V.flux, kappa, t, rule, g);
      auto ids = local_test_ids(*V.scalar, *V.flux, t);
      for (int q = 0; q < nq; ++q) {
        Vec2 x = g.v0 + g.J * rule.points.col(q);
        Real wq = rule.weights[q] * g.detJ;
        Complex f1 = data.f1 ? data.f1(x) : Complex(0, 0);
        Vec2c f2 = data.f2 ? data.f2(x) : Vec2c(Complex(0, 0), Complex(0, 0));
        for (size_t a = 0; a < ids.size(); ++a) {
          Complex contrib = f1 * L.eta(a, q) + f2.x() * L.vx(a, q) + f2.y() * L.vy(a, q);
          if (contrib != Complex(0, 0)) qhat[ids[a]] += wq * contrib;
        }
      }
    }
  }

  if (data.g_dirichlet || data.g_flux) {
    EdgeQuadrature erule = edge_quadrature(base * mult);
    const int nq = static_cast<int>(erule.points.size());
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const MeshEdge& edge = mesh.edges[e];
      if (!edge.tag) continue;
      const bool dirichlet = *edge.tag == BoundaryTag::Dirichlet;
      if (dirichlet && !data.g_dirichlet) continue;
      if (!dirichlet && !data.g_flux) continue;
      const int t = edge.tri[0];
      ElementGeometry g = element_geometry(mesh, t);
      Vec2 plo = mesh.vertices[edge.a], phi = mesh.vertices[edge.b];
      Vec2 d = phi - plo;
      Real len = d.norm();
      Vec2 n(d.y(), -d.x());
      n /= len;
      Vec2 mid = 0.5 * (plo + phi);
      if ((mid - mesh.centroid(t)).dot(n) < 0) n = -n;  // outward

      Eigen::Matrix2Xd ref(2, nq);
      for (int j = 0; j < nq; ++j) {
        Vec2 x = plo + erule.points[j] * d;
        ref.col(j) = g.Jinv * (x - g.v0);
      }
      if (dirichlet) {
        Eigen::Matrix2Xd phys(2, nq);
        for (int j = 0; j < nq; ++j) phys.col(j) = g.v0 + g.J * ref.col(j);
        MatrixXr fvx, fvy, fdv;
        V.flux->eval(t, phys, fvx, fvy, fdv);
        for (int j = 0; j < nq; ++j) {
          Vec2 x = plo + erule.points[j] * d;
          Complex gD = data.g_dirichlet(x);
          Real wj = erule.weights[j] * len;
          for (size_t a = 0; a < V.flux->elem_dofs[t].size(); ++a) {
            Real vn = fvx(a, j) * n.x() + fvy(a, j) * n.y();
            if (vn != 0.0) qhat[V.scalar->dim + V.flux->elem_dofs[t][a]] -= wj * gD * vn;
          }
        }
      } else {
        MatrixXr vals;
        V.scalar->eval_basis(t, ref, vals);
        for (int j = 0; j < nq; ++j) {
          Vec2 x = plo + erule.points[j] * d;
          Complex gv = data.g_flux(x, n);
          Real wj = erule.weights[j] * len;
          for (size_t a = 0; a < V.scalar->elem_dofs[t].size(); ++a)
            if (vals(a, j) != 0.0) qhat[V.scalar->elem_dofs[t][a]] += wj * gv * vals(a, j);
        }
      }
    }
  }
  return qhat;
}

SparseXr assemble_gram_unconstrained(const ConstrainedTestSpace& V, Real kappa) {
  const Triangulation& mesh = *V.scalar->mesh;
  const int pt = V.scalar->p;
  QuadratureRule rule = triangle_quadrature(2 * pt + 2);
  std::vector<TripletR> trips;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    LocalAdjoint L = local_adjoint_rows(*V.scalar, *V.flux, kappa, t, rule, g);
    auto ids = local_test_ids(*V.scalar, *V.flux, t);
    const int nl = static_cast<int>(ids.size());
    VectorXr wq = rule.weights * g.detJ;
    MatrixXr Mloc = (L.s * wq.asDiagonal()) * L.s.transpose();
    Mloc.noalias() += (L.wx * wq.asDiagonal()) * L.wx.transpose();
    Mloc.noalias() += (L.wy * wq.asDiagonal()) * L.wy.transpose();
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nl; ++b)
        trips.emplace_back(ids[a], ids[b], a <= b ? Mloc(a, b) : Mloc(b, a));
  }
  SparseXr Mhat(V.n_unconstrained, V.n_unconstrained);
  Mhat.setFromTriplets(trips.begin(), trips.end());
  return Mhat;
}

}  // namespace

SparseXc assemble_test_gram(const ConstrainedTestSpace& V, Real kappa) {
  if (!(kappa > 0)) throw ConfigError("kappa must be positive");
  SparseXr Mhat = assemble_gram_unconstrained(V, kappa);
  SparseXc XiH = SparseXc(V.Xi.adjoint());
  SparseXc M = hermitianize(XiH * (Mhat.cast<Complex>() * V.Xi).eval());
  M.makeCompressed();
  return M;
}

SaddleSystem assemble_system(std::shared_ptr<const ConstrainedTestSpace> V,
                             std::shared_ptr<const RescaledTrialBasis> U, const ProblemData& data) {
  if (V->scalar->mesh != U->scalar->mesh)
    throw MeshMismatch("trial and test spaces built on different meshes");
  if (!(data.kappa > 0)) throw ConfigError("kappa must be positive");
  const Triangulation& mesh = *V->scalar->mesh;
  const Real kappa = data.kappa;
  const int pt = V->scalar->p;
  if (U->scalar->p > pt + 1) throw ConfigError("trial degree exceeds exactness of assembly rule");

  QuadratureRule rule = triangle_quadrature(2 * pt + 2);

  std::vector<TripletR> bh_trips;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    LocalAdjoint L = local_adjoint_rows(*V->scalar, *V->flux, kappa, t, rule, g);
    auto ids = local_test_ids(*V->scalar, *V->flux, t);
    const int nl = static_cast<int>(ids.size());
    VectorXr wq = rule.weights * g.detJ;

    // trial pairing: component 0 pairs with s, components 1,2 with w
    MatrixXr tvals;
    U->scalar->eval_basis(t, rule.points, tvals);
    const auto& tids = U->scalar->elem_dofs[t];
    const int nlt = static_cast<int>(tids.size());
    MatrixXr b0 = (L.s * wq.asDiagonal()) * tvals.transpose();   // nl x nlt
    MatrixXr b1 = (L.wx * wq.asDiagonal()) * tvals.transpose();
    MatrixXr b2 = (L.wy * wq.asDiagonal()) * tvals.transpose();
    for (int a = 0; a < nl; ++a)
      for (int i = 0; i < nlt; ++i) {
        Real sc = U->scale[tids[i]];
        bh_trips.emplace_back(ids[a], 0 * U->scalar->dim + tids[i], sc * b0(a, i));
        bh_trips.emplace_back(ids[a], 1 * U->scalar->dim + tids[i], sc * b1(a, i));
        bh_trips.emplace_back(ids[a], 2 * U->scalar->dim + tids[i], sc * b2(a, i));
      }
  }

  SparseXr Bhat(V->n_unconstrained, U->dim);
  Bhat.setFromTriplets(bh_trips.begin(), bh_trips.end());

  SaddleSystem sys;
  sys.kappa = kappa;
  sys.V = V;
  sys.U = U;
  SparseXc XiH = SparseXc(V->Xi.adjoint());
  sys.M = assemble_test_gram(*V, kappa);
  sys.B = (XiH * Bhat.cast<Complex>()).pruned();
  sys.B.makeCompressed();

  // data functional, refined until the quadrature has converged
  VectorXc prev = SparseXc(V->Xi.adjoint()) * assemble_q_unconstrained(*V, data, 0);
  for (int level = 1;; ++level) {
    if (level > 6)
      throw QuadratureNonConvergent("data functional quadrature did not converge");
    VectorXc next = SparseXc(V->Xi.adjoint()) * assemble_q_unconstrained(*V, data, level);
    Real scale = std::max(next.norm(), 1e-300);
    if ((next - prev).norm() <= 1e-12 * scale) {
      sys.q = next;
      break;
    }
    prev = next;
  }
  return sys;
}

SparseXr assemble_trial_mass(const RescaledTrialBasis& U) {
  const Triangulation& mesh = *U.scalar->mesh;
  const int p = U.scalar->p;
  QuadratureRule rule = triangle_quadrature(2 * p);
  std::vector<TripletR> trips;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    MatrixXr vals;
    U.scalar->eval_basis(t, rule.points, vals);
    VectorXr wq = rule.weights * g.detJ;
    MatrixXr Mloc = (vals * wq.asDiagonal()) * vals.transpose();
    const auto& ids = U.scalar->elem_dofs[t];
    const int nl = static_cast<int>(ids.size());
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nl; ++b) {
        Real v = U.scale[ids[a]] * U.scale[ids[b]] * (a <= b ? Mloc(a, b) : Mloc(b, a));
        for (int comp = 0; comp < 3; ++comp)
          trips.emplace_back(comp * U.scalar->dim + ids[a], comp * U.scalar->dim + ids[b], v);
      }
  }
  SparseXr MU(U.dim, U.dim);
  MU.setFromTriplets(trips.begin(), trips.end());
  return MU;
}

VectorXc apply_Mu(const SparseXr& MU, const VectorXc& z) {
  if (MU.cols() != z.size()) throw MeshMismatch("apply_Mu dimension mismatch");
  return MU * z.real() + Complex(0, 1) * (MU * z.imag());
}

MatrixXc local_patch_gram(const SparseXc& M, const std::vector<int>& dofs) {
  const int n = static_cast<int>(dofs.size());
  MatrixXc out(n, n);
  for (int j = 0; j < n; ++j) {
    // column extraction via sparse column scan
    std::map<int, Complex> col;
    for (SparseXc::InnerIterator it(M, dofs[j]); it; ++it) col[static_cast<int>(it.row())] = it.value();
    for (int i = 0; i < n; ++i) {
      auto f = col.find(dofs[i]);
      out(i, j) = f == col.end() ? Complex(0, 0) : f->second;
    }
  }
  return out;
}

}  // namespace helmfosls
