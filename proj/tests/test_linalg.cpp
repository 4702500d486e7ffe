#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helmfosls/linalg.hpp"

#include <cmath>
#include <random>

using namespace helmfosls;

namespace {

std::mt19937 rng(11);
Complex crand() {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return Complex(d(rng), d(rng));
}
MatrixXc crandmat(int n) {
  MatrixXc A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = crand();
  return A;
}
VectorXc crandvec(int n) {
  VectorXc v(n);
  for (int i = 0; i < n; ++i) v[i] = crand();
  return v;
}

// hermitian matrix with a prescribed spectrum, A = U diag(lam) U^H
MatrixXc with_spectrum(const VectorXr& lam) {
  int n = static_cast<int>(lam.size());
  Eigen::HouseholderQR<MatrixXc> qr(crandmat(n));
  MatrixXc U = qr.householderQ();
  return U * lam.asDiagonal() * U.adjoint();
}

// scalar error factor of the semi-iteration labelled "degree k" on [a, b]
double cheb_T(int m, double y) {
  if (y >= 1.0) return std::cosh(m * std::acosh(y));
  if (y <= -1.0) return (m % 2 ? -1.0 : 1.0) * std::cosh(m * std::acosh(-y));
  return std::cos(m * std::acos(y));
}
double error_factor(double a, double b, int degree, double t) {
  double sigma0 = (b + a) / (b - a);
  double sigmat = (b + a - 2.0 * t) / (b - a);
  return cheb_T(degree + 1, sigmat) / cheb_T(degree + 1, sigma0);
}

}  // namespace

TEST_CASE("generalized eigenvalues of a constructed pencil") {
  VectorXr lam(4);
  lam << -2.0, 0.5, 0.5, 7.0;
  MatrixXc Y = crandmat(4);
  Y += 4.0 * MatrixXc::Identity(4, 4);  // keep it comfortably invertible
  MatrixXc M = Y * Y.adjoint();
  MatrixXc A = Y * lam.asDiagonal() * Y.adjoint();
  VectorXr got = dense_generalized_eig(A, M);
  REQUIRE(got.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(lam[i]).epsilon(1e-11));
}

TEST_CASE("generalized eigensolver validates its inputs") {
  MatrixXc A = crandmat(5);
  MatrixXc M = MatrixXc::Identity(5, 5);
  CHECK_THROWS_AS(dense_generalized_eig(A, M), NotHPD);  // A not hermitian
  MatrixXc Ah = 0.5 * (A + A.adjoint()).eval();
  MatrixXc Mind = MatrixXc::Identity(5, 5);
  Mind(2, 2) = -1.0;
  CHECK_THROWS_AS(dense_generalized_eig(Ah, Mind), NotHPD);  // M indefinite
  CHECK_THROWS_AS(dense_generalized_eig(Ah, M, 4), DimCapExceeded);
  CHECK_THROWS_AS(dense_generalized_eig(Ah, MatrixXc::Identity(4, 4)), MeshMismatch);
}

TEST_CASE("lanczos finds the extremes of a diagonal operator") {
  int n = 100;
  VectorXr diag(n);
  for (int i = 0; i < n; ++i) diag[i] = 1.0 + i;
  auto applyA = [&](const VectorXc& x) { return VectorXc(diag.asDiagonal() * x); };
  auto ident = [](const VectorXc& x) { return x; };
  LanczosExtremes ex = lanczos_extreme(applyA, ident, n);
  CHECK(ex.converged);
  CHECK(ex.lambda_min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ex.lambda_max == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("lanczos handles the preconditioned pencil") {
  // Q^{-1} A with A = diag(a), Q = diag(q): spectrum a_i / q_i
  int n = 60;
  VectorXr a(n), q(n);
  std::uniform_real_distribution<double> d(0.5, 4.0);
  for (int i = 0; i < n; ++i) {
    a[i] = d(rng);
    q[i] = d(rng);
  }
  VectorXr ratio = a.cwiseQuotient(q);
  auto applyA = [&](const VectorXc& x) { return VectorXc(a.asDiagonal() * x); };
  auto applyQinv = [&](const VectorXc& x) { return VectorXc(x.cwiseQuotient(q.cast<Complex>())); };
  LanczosExtremes ex = lanczos_extreme(applyA, applyQinv, n, 1e-12);
  CHECK(ex.converged);
  CHECK(ex.lambda_min == doctest::Approx(ratio.minCoeff()).epsilon(1e-7));
  CHECK(ex.lambda_max == doctest::Approx(ratio.maxCoeff()).epsilon(1e-7));
}

TEST_CASE("lanczos on a dense hermitian matrix with known spectrum") {
  VectorXr lam(40);
  for (int i = 0; i < 40; ++i) lam[i] = -3.0 + 0.35 * i;  // indefinite, includes negatives
  MatrixXc A = with_spectrum(lam);
  auto applyA = [&](const VectorXc& x) { return VectorXc(A * x); };
  auto ident = [](const VectorXc& x) { return x; };
  LanczosExtremes ex = lanczos_extreme(applyA, ident, 40, 1e-11);
  CHECK(ex.converged);
  CHECK(ex.lambda_min == doctest::Approx(lam.minCoeff()).epsilon(1e-6));
  CHECK(ex.lambda_max == doctest::Approx(lam.maxCoeff()).epsilon(1e-6));
}

TEST_CASE("lanczos copes with an identity operator") {
  auto ident = [](const VectorXc& x) { return x; };
  LanczosExtremes ex = lanczos_extreme(ident, ident, 30);
  CHECK(ex.lambda_min == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ex.lambda_max == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("chebyshev degree zero is the richardson step") {
  int n = 12;
  VectorXr m(n);
  std::uniform_real_distribution<double> d(1.0, 3.0);
  for (int i = 0; i < n; ++i) m[i] = d(rng);
  auto applyM = [&](const VectorXc& x) { return VectorXc(m.asDiagonal() * x); };
  VectorXc rhs = crandvec(n);
  VectorXc x = chebyshev_apply(applyM, 1.0, 3.0, 0, rhs);
  VectorXc expect = (2.0 / 4.0) * rhs;
  CHECK((x - expect).norm() <= 1e-14 * rhs.norm());
}

TEST_CASE("chebyshev semi-iteration matches the scalar polynomial") {
  // on a diagonal operator the iterate is p_k(m_i) rhs_i with
  // 1 - m p_k(m) = T_{k+1}(sigma(m)) / T_{k+1}(sigma(0))
  double a = 0.4, b = 5.0;
  int n = 25;
  VectorXr m(n);
  for (int i = 0; i < n; ++i) m[i] = a + (b - a) * i / (n - 1.0);
  auto applyM = [&](const VectorXc& x) { return VectorXc(m.asDiagonal() * x); };
  VectorXc rhs = crandvec(n);
  for (int degree : {0, 1, 2, 3, 5, 8}) {
    VectorXc x = chebyshev_apply(applyM, a, b, degree, rhs);
    for (int i = 0; i < n; ++i) {
      Complex expect = (1.0 - error_factor(a, b, degree, m[i])) / m[i] * rhs[i];
      CHECK(std::abs(x[i] - expect) <= 1e-11 * (1.0 + std::abs(rhs[i])));
    }
  }
}

TEST_CASE("chebyshev application is linear in the right-hand side") {
  int n = 18;
  VectorXr m(n);
  std::uniform_real_distribution<double> d(0.7, 2.2);
  for (int i = 0; i < n; ++i) m[i] = d(rng);
  auto applyM = [&](const VectorXc& x) { return VectorXc(m.asDiagonal() * x); };
  VectorXc u = crandvec(n), v = crandvec(n);
  Complex al = crand(), be = crand();
  VectorXc lhs = chebyshev_apply(applyM, 0.7, 2.2, 4, al * u + be * v);
  VectorXc rhs = al * chebyshev_apply(applyM, 0.7, 2.2, 4, u) +
                 be * chebyshev_apply(applyM, 0.7, 2.2, 4, v);
  CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
}

TEST_CASE("chebyshev error bound and degree selection") {
  double a = 0.25, b = 4.0;
  double sigma0 = (b + a) / (b - a);
  for (int k : {0, 1, 2, 4, 7}) {
    CHECK(chebyshev_error_bound(a, b, k) ==
          doctest::Approx(1.0 / cheb_T(k + 1, sigma0)).epsilon(1e-12));
  }
  for (double eps : {0.5, 0.1, 0.01, 1e-4}) {
    int k = chebyshev_degree_for(a, b, eps);
    CHECK(chebyshev_error_bound(a, b, k) <= eps);
    if (k > 0) CHECK(chebyshev_error_bound(a, b, k - 1) > eps);
  }
  CHECK_THROWS_AS(chebyshev_apply([](const VectorXc& x) { return x; }, -1.0, 2.0, 1,
                                  VectorXc::Ones(3)),
                  NotHPD);
}

TEST_CASE("hermitianize is exact") {
  int n = 20;
  std::vector<TripletC> trips;
  std::uniform_int_distribution<int> idx(0, n - 1);
  for (int k = 0; k < 120; ++k) trips.emplace_back(idx(rng), idx(rng), crand());
  SparseXc A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  SparseXc R = hermitianize(A);
  CHECK((SparseXc(R.adjoint()) - R).norm() == 0.0);
  MatrixXc expect = 0.5 * (MatrixXc(A) + MatrixXc(A).adjoint());
  CHECK((MatrixXc(R) - expect).norm() == 0.0);
  // already-hermitian input is returned unchanged
  SparseXc H = hermitianize(R);
  CHECK((MatrixXc(H) - MatrixXc(R)).norm() == 0.0);
}
