#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helmfosls/quadrature.hpp"

#include <cmath>

using namespace helmfosls;

namespace {

// exact monomial integral over the reference triangle: a! b! / (a+b+2)!
double tri_monomial(int a, int b) {
  double v = 1.0;
  // a!b!/(a+b+2)! = prod_{j=1..b} j/(a+j) / ((a+b+1)(a+b+2))
  for (int j = 1; j <= b; ++j) v *= double(j) / double(a + j);
  v /= double(a + b + 1) * double(a + b + 2);
  return v;
}

}  // namespace

TEST_CASE("triangle rules integrate monomials exactly up to their degree") {
  for (int d = 1; d <= 12; ++d) {
    QuadratureRule rule = triangle_quadrature(d);
    REQUIRE(rule.degree >= d);
    for (int a = 0; a + 0 <= rule.degree; ++a) {
      for (int b = 0; a + b <= rule.degree; ++b) {
        double s = 0;
        for (int q = 0; q < rule.weights.size(); ++q)
          s += rule.weights[q] * std::pow(rule.points(0, q), a) * std::pow(rule.points(1, q), b);
        double exact = tri_monomial(a, b);
        CHECK(s == doctest::Approx(exact).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("triangle weights are positive and sum to the reference area") {
  for (int d : {1, 2, 3, 5, 8, 13, 20}) {
    QuadratureRule rule = triangle_quadrature(d);
    for (int q = 0; q < rule.weights.size(); ++q) CHECK(rule.weights[q] > 0.0);
    CHECK(rule.weights.sum() == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("triangle points lie strictly inside the reference element") {
  for (int d : {1, 4, 9, 16}) {
    QuadratureRule rule = triangle_quadrature(d);
    for (int q = 0; q < rule.points.cols(); ++q) {
      double x = rule.points(0, q), y = rule.points(1, q);
      CHECK(x > 0.0);
      CHECK(y > 0.0);
      CHECK(x + y < 1.0);
    }
  }
}

TEST_CASE("point count grows quadratically, not worse") {
  // conical product: n^2 points for exactness 2n-1 (or 2n-2)
  for (int d = 1; d <= 15; ++d) {
    QuadratureRule rule = triangle_quadrature(d);
    int n = (d + 2) / 2;
    CHECK(rule.points.cols() <= n * n);
  }
}

TEST_CASE("edge rules integrate polynomials on the unit interval") {
  for (int d = 1; d <= 17; ++d) {
    EdgeQuadrature rule = edge_quadrature(d);
    REQUIRE(rule.degree >= d);
    for (int k = 0; k <= rule.degree; ++k) {
      double s = 0;
      for (int q = 0; q < rule.weights.size(); ++q)
        s += rule.weights[q] * std::pow(rule.points[q], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
    CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int q = 0; q < rule.points.size(); ++q) {
      CHECK(rule.points[q] > 0.0);
      CHECK(rule.points[q] < 1.0);
    }
  }
}

TEST_CASE("gauss_legendre_points returns sorted interior nodes") {
  for (int n : {1, 2, 3, 5, 9}) {
    VectorXr pts = gauss_legendre_points(n);
    REQUIRE(pts.size() == n);
    for (int i = 0; i < n; ++i) {
      CHECK(pts[i] > 0.0);
      CHECK(pts[i] < 1.0);
      if (i > 0) CHECK(pts[i] > pts[i - 1]);
    }
    // symmetric about 1/2
    for (int i = 0; i < n; ++i) CHECK(pts[i] + pts[n - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  // closed forms for small n
  VectorXr p2 = gauss_legendre_points(2);
  CHECK(p2[0] == doctest::Approx(0.5 - 0.5 / std::sqrt(3.0)).epsilon(1e-15));
  VectorXr p3 = gauss_legendre_points(3);
  CHECK(p3[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p3[2] == doctest::Approx(0.5 + 0.5 * std::sqrt(0.6)).epsilon(1e-15));
}
