#include "helmfosls/femspace.hpp"

#include <cmath>
#include <map>

#include "helmfosls/quadrature.hpp"

namespace helmfosls {

ElementGeometry element_geometry(const Triangulation& mesh, int t) {
  const auto& v = mesh.triangles[t].v;
  ElementGeometry g;
  g.v0 = mesh.vertices[v[0]];
  g.J.col(0) = mesh.vertices[v[1]] - g.v0;
  g.J.col(1) = mesh.vertices[v[2]] - g.v0;
  g.detJ = g.J.determinant();
  if (!(g.detJ > 0.0)) throw InvalidGeometry("element with non-positive Jacobian");
  g.Jinv = g.J.inverse();
  return g;
}

namespace {

Real factorial(int n) {
  Real r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

Real power(Real x, int n) {
  if (n <= 0) return n == 0 ? 1.0 : 0.0;
  Real r = x;
  for (int k = 1; k < n; ++k) r *= x;
  return r;
}

}  // namespace

void LagrangeReference::eval(const Eigen::Matrix3Xd& bary, MatrixXr& vals) const {
  const int npts = static_cast<int>(bary.cols());
  MatrixXr bern(n_nodes, npts);
  for (int m = 0; m < n_nodes; ++m) {
    const auto& a = lattice[m];
    Real c = factorial(p) / (factorial(a[0]) * factorial(a[1]) * factorial(a[2]));
    for (int q = 0; q < npts; ++q)
      bern(m, q) = c * power(bary(0, q), a[0]) * power(bary(1, q), a[1]) * power(bary(2, q), a[2]);
  }
  vals.noalias() = bernstein_coeff.transpose() * bern;
}

void LagrangeReference::eval_grad(const Eigen::Matrix3Xd& bary, std::array<MatrixXr, 3>& dldl) const {
  const int npts = static_cast<int>(bary.cols());
  for (int l = 0; l < 3; ++l) {
    MatrixXr dbern(n_nodes, npts);
    for (int m = 0; m < n_nodes; ++m) {
      auto a = lattice[m];
      Real c = factorial(p) / (factorial(a[0]) * factorial(a[1]) * factorial(a[2]));
      int e = a[l];
      for (int q = 0; q < npts; ++q) {
        if (e == 0) {
          dbern(m, q) = 0.0;
          continue;
        }
        std::array<int, 3> b = a;
        b[l] -= 1;
        dbern(m, q) = c * e * power(bary(0, q), b[0]) * power(bary(1, q), b[1]) * power(bary(2, q), b[2]);
      }
    }
    dldl[l].noalias() = bernstein_coeff.transpose() * dbern;
  }
}

const LagrangeReference& lagrange_reference(int p) {
  static std::map<int, LagrangeReference> cache;
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;

  LagrangeReference ref;
  ref.p = p;
  // vertices, then edge chains, then interior
  ref.lattice.push_back({p, 0, 0});
  ref.lattice.push_back({0, p, 0});
  ref.lattice.push_back({0, 0, p});
  ref.entity.push_back({0, 0, 0});
  ref.entity.push_back({0, 1, 0});
  ref.entity.push_back({0, 2, 0});
  for (int s = 1; s < p; ++s) {  // local edge 0: from vertex 1 to vertex 2
    ref.lattice.push_back({0, p - s, s});
    ref.entity.push_back({1, 0, s});
  }
  for (int s = 1; s < p; ++s) {  // local edge 1: from vertex 2 to vertex 0
    ref.lattice.push_back({s, 0, p - s});
    ref.entity.push_back({1, 1, s});
  }
  for (int s = 1; s < p; ++s) {  // local edge 2: from vertex 0 to vertex 1
    ref.lattice.push_back({p - s, s, 0});
    ref.entity.push_back({1, 2, s});
  }
  int cnt = 0;
  for (int a = 1; a <= p - 2; ++a)
    for (int b = 1; a + b <= p - 1; ++b) {
      ref.lattice.push_back({a, b, p - a - b});
      ref.entity.push_back({2, cnt++, 0});
    }
  ref.n_nodes = static_cast<int>(ref.lattice.size());

  // invert the Bernstein collocation matrix at the lattice nodes
  Eigen::Matrix3Xd nodes(3, ref.n_nodes);
  for (int m = 0; m < ref.n_nodes; ++m)
    for (int l = 0; l < 3; ++l) nodes(l, m) = static_cast<Real>(ref.lattice[m][l]) / p;
  MatrixXr A(ref.n_nodes, ref.n_nodes);
  for (int n = 0; n < ref.n_nodes; ++n) {
    const auto& a = ref.lattice[n];
    Real c = factorial(p) / (factorial(a[0]) * factorial(a[1]) * factorial(a[2]));
    for (int m = 0; m < ref.n_nodes; ++m)
      A(m, n) = c * power(nodes(0, m), a[0]) * power(nodes(1, m), a[1]) * power(nodes(2, m), a[2]);
  }
  ref.bernstein_coeff = A.partialPivLu().solve(MatrixXr::Identity(ref.n_nodes, ref.n_nodes));

  return cache.emplace(p, std::move(ref)).first->second;
}

LagrangeSpace::LagrangeSpace(const Triangulation& mesh_, int p_) : mesh(&mesh_), p(p_) {
  if (p < 1) throw InvalidGeometry("polynomial degree must be >= 1");
  const LagrangeReference& ref = lagrange_reference(p);
  const int nv = mesh->n_vertices();
  const int ne = mesh->n_edges();
  const int nt = mesh->n_triangles();
  n_edge_dofs = p - 1;
  const int nint = (p - 1) * (p - 2) / 2;
  dim = nv + ne * n_edge_dofs + nt * nint;

  dof_entity.resize(dim);
  for (int i = 0; i < nv; ++i) dof_entity[i] = {0, i};
  for (int e = 0; e < ne; ++e)
    for (int s = 0; s < n_edge_dofs; ++s) dof_entity[nv + e * n_edge_dofs + s] = {1, e};
  for (int t = 0; t < nt; ++t)
    for (int s = 0; s < nint; ++s) dof_entity[nv + ne * n_edge_dofs + t * nint + s] = {2, t};

  elem_dofs.assign(nt, std::vector<int>(ref.n_nodes, -1));
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh->triangles[t];
    for (int m = 0; m < ref.n_nodes; ++m) {
      const auto& ent = ref.entity[m];
      if (ent.kind == 0) {
        elem_dofs[t][m] = tri.v[ent.which];
      } else if (ent.kind == 1) {
        int ge = mesh->tri_edges[t][ent.which];
        int start = tri.v[(ent.which + 1) % 3];
        int s = (start == mesh->edges[ge].a) ? ent.slot : p - ent.slot;
        elem_dofs[t][m] = nv + ge * n_edge_dofs + (s - 1);
      } else {
        elem_dofs[t][m] = nv + ne * n_edge_dofs + t * nint + ent.which;
      }
    }
  }
}

void LagrangeSpace::eval_basis(int t, const Eigen::Matrix2Xd& ref_pts, MatrixXr& vals) const {
  (void)t;
  const int npts = static_cast<int>(ref_pts.cols());
  Eigen::Matrix3Xd bary(3, npts);
  bary.row(1) = ref_pts.row(0);
  bary.row(2) = ref_pts.row(1);
  bary.row(0) = VectorXr::Ones(npts).transpose() - ref_pts.row(0) - ref_pts.row(1);
  lagrange_reference(p).eval(bary, vals);
}

void LagrangeSpace::eval_basis(int t, const Eigen::Matrix2Xd& ref_pts, MatrixXr& vals, MatrixXr& gx,
                               MatrixXr& gy) const {
  eval_basis(t, ref_pts, vals);
  const int npts = static_cast<int>(ref_pts.cols());
  Eigen::Matrix3Xd bary(3, npts);
  bary.row(1) = ref_pts.row(0);
  bary.row(2) = ref_pts.row(1);
  bary.row(0) = VectorXr::Ones(npts).transpose() - ref_pts.row(0) - ref_pts.row(1);
  std::array<MatrixXr, 3> dldl;
  lagrange_reference(p).eval_grad(bary, dldl);
  ElementGeometry g = element_geometry(*mesh, t);
  // gradients of barycentric coordinates are constant on the element
  Vec2 g1(g.Jinv(0, 0), g.Jinv(0, 1));
  Vec2 g2(g.Jinv(1, 0), g.Jinv(1, 1));
  Vec2 g0 = -g1 - g2;
  gx = dldl[0] * g0.x() + dldl[1] * g1.x() + dldl[2] * g2.x();
  gy = dldl[0] * g0.y() + dldl[1] * g1.y() + dldl[2] * g2.y();
}

std::vector<std::vector<int>> LagrangeSpace::dof_support() const {
  std::vector<std::vector<int>> supp(dim);
  for (int t = 0; t < mesh->n_triangles(); ++t)
    for (int d : elem_dofs[t]) supp[d].push_back(t);
  return supp;
}

namespace {

// monomial exponent list for total degree <= d
std::vector<std::array<int, 2>> monomials_upto(int d) {
  std::vector<std::array<int, 2>> out;
  for (int total = 0; total <= d; ++total)
    for (int i = 0; i <= total; ++i) out.push_back({total - i, i});
  return out;
}

}  // namespace

RaviartThomasSpace::RaviartThomasSpace(const Triangulation& mesh_, int pt_) : mesh(&mesh_), pt(pt_) {
  if (pt < 1) throw InvalidGeometry("flux trace degree must be >= 1");
  ndof_edge = pt + 1;
  ndof_int = pt * (pt + 1);
  nloc = (pt + 1) * (pt + 3);
  const int ne = mesh->n_edges();
  const int nt = mesh->n_triangles();
  dim = ne * ndof_edge + nt * ndof_int;

  const auto mono = monomials_upto(pt);            // generators
  const auto mono_w = monomials_upto(pt - 1);      // interior moment weights
  const int M = static_cast<int>(mono.size());
  const int ngen = 2 * M + (pt + 1);
  const VectorXr tpts = gauss_legendre_points(ndof_edge);
  const QuadratureRule vol = triangle_quadrature(2 * pt);

  auto gen_at = [&](const Vec2& x, int g, Real h) -> std::array<Real, 3> {
    // returns (vx, vy, physical divergence)
    if (g < M) {
      Real m = power(x.x(), mono[g][0]) * power(x.y(), mono[g][1]);
      Real dm = mono[g][0] == 0 ? 0.0 : mono[g][0] * power(x.x(), mono[g][0] - 1) * power(x.y(), mono[g][1]);
      return {m, 0.0, dm / h};
    }
    if (g < 2 * M) {
      int k = g - M;
      Real m = power(x.x(), mono[k][0]) * power(x.y(), mono[k][1]);
      Real dm = mono[k][1] == 0 ? 0.0 : mono[k][1] * power(x.x(), mono[k][0]) * power(x.y(), mono[k][1] - 1);
      return {0.0, m, dm / h};
    }
    int k = g - 2 * M;  // radial generator x * x1^(pt-k) x2^k
    Real m = power(x.x(), pt - k) * power(x.y(), k);
    return {x.x() * m, x.y() * m, (2.0 + pt) * m / h};
  };

  elements.resize(nt);
  elem_dofs.assign(nt, std::vector<int>(nloc, -1));
  for (int t = 0; t < nt; ++t) {
    ElementGeometry g = element_geometry(*mesh, t);
    Element& el = elements[t];
    el.c = mesh->centroid(t);
    el.h = std::sqrt(g.detJ);

    MatrixXr D(nloc, ngen);
    int row = 0;
    for (int k = 0; k < 3; ++k) {
      int ge = mesh->tri_edges[t][k];
      Vec2 plo = mesh->vertices[mesh->edges[ge].a];
      Vec2 phi = mesh->vertices[mesh->edges[ge].b];
      Vec2 d = phi - plo;
      Vec2 n(d.y(), -d.x());
      n.normalize();
      for (int j = 0; j < ndof_edge; ++j, ++row) {
        Vec2 x = plo + tpts[j] * d;
        Vec2 xl = (x - el.c) / el.h;
        for (int gg = 0; gg < ngen; ++gg) {
          auto val = gen_at(xl, gg, el.h);
          D(row, gg) = val[0] * n.x() + val[1] * n.y();
        }
        elem_dofs[t][row] = edge_dof(ge, j);
      }
    }
    for (size_t wi = 0; wi < mono_w.size(); ++wi) {
      for (int comp = 0; comp < 2; ++comp, ++row) {
        for (int gg = 0; gg < ngen; ++gg) D(row, gg) = 0.0;
        for (int q = 0; q < vol.weights.size(); ++q) {
          Vec2 x = g.v0 + g.J * vol.points.col(q);
          Vec2 xl = (x - el.c) / el.h;
          Real wq = vol.weights[q] * g.detJ;
          Real mw = power(xl.x(), mono_w[wi][0]) * power(xl.y(), mono_w[wi][1]);
          for (int gg = 0; gg < ngen; ++gg) {
            auto val = gen_at(xl, gg, el.h);
            D(row, gg) += wq * mw * val[comp];
          }
        }
        elem_dofs[t][row] = interior_dof(t, 2 * static_cast<int>(wi) + comp);
      }
    }

    el.coeff = D.partialPivLu().solve(MatrixXr::Identity(nloc, nloc));
    Real resid = (D * el.coeff - MatrixXr::Identity(nloc, nloc)).cwiseAbs().maxCoeff();
    if (!(resid < 1e-7)) throw InvalidGeometry("ill-conditioned flux element basis");
  }
}

void RaviartThomasSpace::eval(int t, const Eigen::Matrix2Xd& phys_pts, MatrixXr& vx, MatrixXr& vy,
                              MatrixXr& dv) const {
  const Element& el = elements[t];
  const auto mono = monomials_upto(pt);
  const int M = static_cast<int>(mono.size());
  const int ngen = 2 * M + (pt + 1);
  const int npts = static_cast<int>(phys_pts.cols());

  MatrixXr gx(ngen, npts), gy(ngen, npts), gd(ngen, npts);
  for (int q = 0; q < npts; ++q) {
    Vec2 xl = (Vec2(phys_pts(0, q), phys_pts(1, q)) - el.c) / el.h;
    for (int g = 0; g < M; ++g) {
      Real m = power(xl.x(), mono[g][0]) * power(xl.y(), mono[g][1]);
      Real dm = mono[g][0] == 0 ? 0.0 : mono[g][0] * power(xl.x(), mono[g][0] - 1) * power(xl.y(), mono[g][1]);
      gx(g, q) = m; gy(g, q) = 0.0; gd(g, q) = dm / el.h;
      Real dm2 = mono[g][1] == 0 ? 0.0 : mono[g][1] * power(xl.x(), mono[g][0]) * power(xl.y(), mono[g][1] - 1);
      gx(M + g, q) = 0.0; gy(M + g, q) = m; gd(M + g, q) = dm2 / el.h;
    }
    for (int k = 0; k <= pt; ++k) {
      Real m = power(xl.x(), pt - k) * power(xl.y(), k);
      gx(2 * M + k, q) = xl.x() * m;
      gy(2 * M + k, q) = xl.y() * m;
      gd(2 * M + k, q) = (2.0 + pt) * m / el.h;
    }
  }
  vx.noalias() = el.coeff.transpose() * gx;
  vy.noalias() = el.coeff.transpose() * gy;
  dv.noalias() = el.coeff.transpose() * gd;
}

ConstrainedTestSpace build_test_space(const Triangulation& mesh, int p_tilde) {
  ConstrainedTestSpace V;
  V.scalar = std::make_shared<LagrangeSpace>(mesh, p_tilde);
  V.flux = std::make_shared<RaviartThomasSpace>(mesh, p_tilde);
  const int ns = V.scalar->dim;
  const int nf = V.flux->dim;
  V.n_unconstrained = ns + nf;

  const int nv = mesh.n_vertices();
  std::map<EdgeKey, int> edge_id;
  for (int e = 0; e < mesh.n_edges(); ++e)
    edge_id.emplace(EdgeKey(mesh.edges[e].a, mesh.edges[e].b), e);

  std::vector<char> drop(V.n_unconstrained, 0);
  for (const auto& [key, tag] : mesh.boundary_tags) {
    int ge = edge_id.at(key);
    if (tag == BoundaryTag::Dirichlet) {
      drop[key.a] = drop[key.b] = 1;
      for (int s = 0; s < p_tilde - 1; ++s) drop[nv + ge * (p_tilde - 1) + s] = 1;
    } else {
      for (int j = 0; j < V.flux->ndof_edge; ++j) drop[ns + V.flux->edge_dof(ge, j)] = 1;
    }
  }

  V.kept_index.assign(V.n_unconstrained, -1);
  for (int i = 0; i < V.n_unconstrained; ++i)
    if (!drop[i]) {
      V.kept_index[i] = static_cast<int>(V.kept.size());
      V.kept.push_back(i);
    }
  V.dim = static_cast<int>(V.kept.size());

  std::vector<TripletC> trips;
  for (int k = 0; k < V.dim; ++k) trips.emplace_back(V.kept[k], k, Complex(1.0, 0.0));

  // Robin edges: flux normal trace = -i * scalar trace, matched at the edge
  // dof points (both traces have degree p_tilde, so this is exact)
  const VectorXr tpts = gauss_legendre_points(p_tilde + 1);
  for (const auto& [key, tag] : mesh.boundary_tags) {
    if (tag != BoundaryTag::Robin) continue;
    int ge = edge_id.at(key);
    // scalar dofs along the edge with 1d node parameters from the low vertex
    std::vector<std::pair<int, Real>> nodes;
    nodes.emplace_back(key.a, 0.0);
    nodes.emplace_back(key.b, 1.0);
    for (int s = 1; s < p_tilde; ++s)
      nodes.emplace_back(nv + ge * (p_tilde - 1) + (s - 1), static_cast<Real>(s) / p_tilde);
    for (int j = 0; j < p_tilde + 1; ++j) {
      int row = ns + V.flux->edge_dof(ge, j);
      Real tj = tpts[j];
      for (size_t m = 0; m < nodes.size(); ++m) {
        int col = V.kept_index[nodes[m].first];
        if (col < 0) continue;
        Real L = 1.0;
        for (size_t n = 0; n < nodes.size(); ++n)
          if (n != m) L *= (tj - nodes[n].second) / (nodes[m].second - nodes[n].second);
        trips.emplace_back(row, col, Complex(0.0, -L));
      }
    }
  }

  V.Xi.resize(V.n_unconstrained, V.dim);
  V.Xi.setFromTriplets(trips.begin(), trips.end());
  V.Xi.makeCompressed();
  return V;
}

RescaledTrialBasis build_trial_basis(const Triangulation& mesh, int p) {
  RescaledTrialBasis U;
  U.scalar = std::make_shared<LagrangeSpace>(mesh, p);
  U.dim = 3 * U.scalar->dim;
  U.scale.resize(U.scalar->dim);
  auto supp = U.scalar->dof_support();
  for (int i = 0; i < U.scalar->dim; ++i) {
    Real h2 = 0.0;
    for (int t : supp[i]) h2 += 2.0 * mesh.area(t);
    U.scale[i] = 1.0 / std::sqrt(h2);
  }
  return U;
}

BAdjointValues evaluate_B_adjoint_unconstrained(const LagrangeSpace& sc, const RaviartThomasSpace& fl,
                                                const VectorXc& unconstrained, Real kappa, int t,
                                                const Eigen::Matrix2Xd& ref_pts) {
  const int npts = static_cast<int>(ref_pts.cols());
  MatrixXr vals, gx, gy;
  sc.eval_basis(t, ref_pts, vals, gx, gy);
  ElementGeometry g = element_geometry(*sc.mesh, t);
  Eigen::Matrix2Xd phys(2, npts);
  for (int q = 0; q < npts; ++q) phys.col(q) = g.v0 + g.J * ref_pts.col(q);
  MatrixXr vx, vy, dv;
  fl.eval(t, phys, vx, vy, dv);

  const int nls = static_cast<int>(sc.elem_dofs[t].size());
  const int nlf = static_cast<int>(fl.elem_dofs[t].size());
  VectorXc cs(nls), cf(nlf);
  for (int m = 0; m < nls; ++m) cs[m] = unconstrained[sc.elem_dofs[t][m]];
  for (int m = 0; m < nlf; ++m) cf[m] = unconstrained[sc.dim + fl.elem_dofs[t][m]];

  auto mixed = [](const MatrixXr& A, const VectorXc& c) -> VectorXc {
    return (A.transpose() * c.real()).template cast<Complex>() +
           Complex(0, 1) * (A.transpose() * c.imag()).template cast<Complex>();
  };

  BAdjointValues out;
  out.eta = mixed(vals, cs);
  VectorXc ex = mixed(gx, cs), ey = mixed(gy, cs);
  VectorXc fx = mixed(vx, cf), fy = mixed(vy, cf), fd = mixed(dv, cf);
  out.v.resize(2, npts);
  out.w.resize(2, npts);
  out.s.resize(npts);
  for (int q = 0; q < npts; ++q) {
    out.v(0, q) = fx[q];
    out.v(1, q) = fy[q];
    out.s[q] = -out.eta[q] - fd[q] / kappa;
    out.w(0, q) = ex[q] / kappa - fx[q];
    out.w(1, q) = ey[q] / kappa - fy[q];
  }
  return out;
}

BAdjointValues evaluate_B_adjoint(const ConstrainedTestSpace& V, const VectorXc& coeffs, Real kappa,
                                  int t, const Eigen::Matrix2Xd& ref_pts) {
  if (coeffs.size() != V.dim) throw MeshMismatch("coefficient size does not match test space");
  VectorXc un = V.Xi * coeffs;
  return evaluate_B_adjoint_unconstrained(*V.scalar, *V.flux, un, kappa, t, ref_pts);
}

}  // namespace helmfosls
