#include "helmfosls/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace helmfosls {

namespace {

// Golub-Welsch: nodes = eigenvalues of the Jacobi matrix, weights from the
// first components of the (normalized) eigenvectors times the zeroth moment.
void golub_welsch(const VectorXr& diag, const VectorXr& offdiag, Real mu0,
                  VectorXr& nodes, VectorXr& weights) {
  const int n = static_cast<int>(diag.size());
  MatrixXr J = MatrixXr::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(J);
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Real v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

// Gauss-Legendre on [-1,1], then mapped to [0,1]
void legendre01(int n, VectorXr& x, VectorXr& w) {
  VectorXr diag = VectorXr::Zero(n), off(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, off, 2.0, x, w);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.5;
  }
}

// Gauss-Jacobi with weight (1-x) on [0,1]:
// recurrence for Jacobi(alpha=1, beta=0) on [-1,1], mapped
void jacobi10_01(int n, VectorXr& x, VectorXr& w) {
  VectorXr diag(n), off(n - 1 > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
  golub_welsch(diag, off, 2.0, x, w);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.25;  // (1-x)dx on [-1,1] -> 4*(1-t)dt on [0,1]
  }
}

}  // namespace

QuadratureRule triangle_quadrature(int degree) {
  if (degree < 0) degree = 0;
  const int n = (degree + 2) / 2;  // n-point rules exact through degree 2n-1
  VectorXr xl, wl, xj, wj;
  legendre01(n, xl, wl);
  jacobi10_01(n, xj, wj);
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  rule.points.resize(2, n * n);
  rule.weights.resize(n * n);
  int q = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i, ++q) {
      rule.points(0, q) = xl[i] * (1.0 - xj[j]);
      rule.points(1, q) = xj[j];
      rule.weights[q] = wl[i] * wj[j];
    }
  return rule;
}

EdgeQuadrature edge_quadrature(int degree) {
  if (degree < 0) degree = 0;
  const int n = (degree + 2) / 2;
  EdgeQuadrature rule;
  legendre01(n, rule.points, rule.weights);
  rule.degree = 2 * n - 1;
  return rule;
}

VectorXr gauss_legendre_points(int n) {
  VectorXr x, w;
  legendre01(n, x, w);
  return x;
}

}  // namespace helmfosls
