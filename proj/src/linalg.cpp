#include "helmfosls/linalg.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace helmfosls {

VectorXr dense_generalized_eig(const MatrixXc& A, const MatrixXc& M, int dim_cap) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw MeshMismatch("generalized eigenproblem dimension mismatch");
  const int n = static_cast<int>(A.rows());
  if (n > dim_cap) throw DimCapExceeded("dense eigensolve beyond size cap");
  Real herm_tol = 1e-12 * std::max(A.cwiseAbs().maxCoeff(), 1.0);
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw NotHPD("matrix A is not Hermitian");
  Real herm_tol_m = 1e-12 * std::max(M.cwiseAbs().maxCoeff(), 1.0);
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > herm_tol_m)
    throw NotHPD("matrix M is not Hermitian");
  Eigen::LLT<MatrixXc> llt(M);
  if (llt.info() != Eigen::Success) throw NotHPD("matrix M is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXc> es(A, M);
  if (es.info() != Eigen::Success) throw NotHPD("generalized eigensolver failed");
  VectorXr lam = es.eigenvalues();

  // residual check ||A x - lambda M x|| <= 1e-8 ||A|| ||x||_M-ish
  Real normA = A.cwiseAbs().rowwise().sum().maxCoeff();
  for (int k = 0; k < n; ++k) {
    VectorXc x = es.eigenvectors().col(k);
    Real resid = (A * x - lam[k] * (M * x)).norm() / std::max(x.norm(), 1e-300);
    if (resid > 1e-8 * std::max(normA, 1.0))
      throw NotHPD("generalized eigensolver residual too large");
  }
  return lam;
}

LanczosExtremes lanczos_extreme(const ApplyFn& applyA, const ApplyFn& applyQinv, int n, Real tol,
                                int max_iter, unsigned seed) {
  LanczosExtremes out;
  std::mt19937 rng(seed);
  std::normal_distribution<Real> dist;

  for (int attempt = 0; attempt < 3; ++attempt) {
    // dual vectors r_j = Q x_j alongside primal x_j, Q-orthonormal
    std::vector<VectorXc> X, R;
    VectorXc r(n);
    for (int i = 0; i < n; ++i) r[i] = Complex(dist(rng), dist(rng));
    VectorXc x = applyQinv(r);
    Real nrm2 = std::real(x.dot(r));
    if (!(nrm2 > 0)) continue;
    Real nrm = std::sqrt(nrm2);
    x /= nrm;
    r /= nrm;

    std::vector<Real> alpha, beta;  // tridiagonal
    Real prev_min = 0, prev_max = 0;
    bool have_prev = false;

    for (int j = 0; j < std::min(max_iter, n); ++j) {
      X.push_back(x);
      R.push_back(r);
      VectorXc s = applyA(x);
      Real a = std::real(x.dot(s));
      alpha.push_back(a);
      s -= a * r;
      if (j > 0) s -= beta.back() * R[j - 1];
      // full reorthogonalization in the Q inner product
      VectorXc xs = applyQinv(s);
      for (int i = 0; i <= j; ++i) {
        Complex c = X[i].dot(s);
        s -= c * R[i];
        xs -= c * X[i];
      }
      Real b2 = std::real(xs.dot(s));

      // current extremes from the tridiagonal
      const int k = static_cast<int>(alpha.size());
      MatrixXr T = MatrixXr::Zero(k, k);
      for (int i = 0; i < k; ++i) T(i, i) = alpha[i];
      for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
      Eigen::SelfAdjointEigenSolver<MatrixXr> es(T);
      Real lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(k - 1);
      out.iterations = k;
      out.lambda_min = lmin;
      out.lambda_max = lmax;
      if (have_prev) {
        Real dmin = std::abs(lmin - prev_min), dmax = std::abs(lmax - prev_max);
        Real scale = std::max(std::abs(lmax), std::abs(lmin));
        if (dmin <= tol * scale && dmax <= tol * scale) {
          out.converged = true;
          return out;
        }
      }
      prev_min = lmin;
      prev_max = lmax;
      have_prev = true;

      if (!(b2 > 0) || std::sqrt(b2) < 1e-14 * std::max(std::abs(lmax), 1.0)) {
        // invariant subspace exhausted: extremes are exact
        if (k > 1 || n == 1) {
          out.converged = true;
          return out;
        }
        break;  // unlucky start, retry
      }
      Real b = std::sqrt(b2);
      beta.push_back(b);
      x = xs / b;
      r = s / b;
      if (j == std::min(max_iter, n) - 1) return out;  // budget exhausted, unconverged
    }
  }
  if (out.iterations == 0) throw LucklessBreakdown("lanczos failed to start after 3 attempts");
  return out;
}

Real chebyshev_error_bound(Real a, Real b_up, int degree) {
  if (!(0 < a && a <= b_up)) throw NotHPD("invalid spectral interval");
  Real sigma = (b_up + a) / (b_up - a);
  if (!std::isfinite(sigma)) return 0.0;  // a == b_up: single point, exact
  // 1 / T_{degree+1}(sigma)
  Real t = std::cosh((degree + 1) * std::acosh(sigma));
  return 1.0 / t;
}

int chebyshev_degree_for(Real a, Real b_up, Real eps_target) {
  for (int k = 0; k <= 200; ++k)
    if (chebyshev_error_bound(a, b_up, k) <= eps_target) return k;
  throw ConfigError("no chebyshev degree under 200 reaches the requested tolerance");
}

VectorXc chebyshev_apply(const ApplyFn& applyM, Real a, Real b_up, int degree, const VectorXc& rhs) {
  if (!(0 < a && a < b_up)) {
    if (a == b_up && a > 0) return rhs / a;
    throw NotHPD("invalid spectral interval");
  }
  const Real theta = (b_up + a) / 2.0;
  const Real delta = (b_up - a) / 2.0;
  const Real sigma1 = theta / delta;
  VectorXc d = rhs / theta;
  VectorXc x = d;
  Real rho_prev = 1.0 / sigma1;
  for (int j = 1; j <= degree; ++j) {
    VectorXc r = rhs - applyM(x);
    Real rho = 1.0 / (2.0 * sigma1 - rho_prev);
    d = (rho * rho_prev) * d + (2.0 * rho / delta) * r;
    x += d;
    rho_prev = rho;
  }
  return x;
}

SparseXc hermitianize(const SparseXc& A) {
  SparseXc At = SparseXc(A.adjoint());
  SparseXc R = (A + At) * Complex(0.5, 0.0);
  R.makeCompressed();
  return R;
}

}  // namespace helmfosls
