#pragma once

#include "helmfosls/types.hpp"

namespace helmfosls {

// quadrature on the reference triangle (0,0), (1,0), (0,1)
struct QuadratureRule {
  Eigen::Matrix2Xd points;
  VectorXr weights;  // sum = 1/2
  int degree;        // exact for total polynomial degree <= degree
};

// conical product rule: Gauss-Legendre x Gauss-Jacobi(1,0); positive weights
QuadratureRule triangle_quadrature(int degree);

// Gauss-Legendre on [0,1]
struct EdgeQuadrature {
  VectorXr points;
  VectorXr weights;
  int degree;
};

EdgeQuadrature edge_quadrature(int degree);
VectorXr gauss_legendre_points(int n);  // n nodes on [0,1]

}  // namespace helmfosls
