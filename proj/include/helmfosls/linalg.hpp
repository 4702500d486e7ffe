#pragma once

#include <functional>

#include "helmfosls/types.hpp"

namespace helmfosls {

using ApplyFn = std::function<VectorXc(const VectorXc&)>;

// eigenvalues of A x = lambda M x, A Hermitian, M Hermitian positive
// definite, ascending; checks hermiticity, definiteness, residuals.
// Dense path only, guarded by a size cap.
VectorXr dense_generalized_eig(const MatrixXc& A, const MatrixXc& M, int dim_cap = 3000);

// extreme eigenvalues of Q^{-1} A (A Hermitian, Q HPD) by Lanczos iteration
// with full reorthogonalization; applyQinv applies Q^{-1}
struct LanczosExtremes {
  Real lambda_min = 0.0;
  Real lambda_max = 0.0;
  int iterations = 0;
  bool converged = false;
};
LanczosExtremes lanczos_extreme(const ApplyFn& applyA, const ApplyFn& applyQinv, int n,
                                Real tol = 1e-10, int max_iter = 400, unsigned seed = 12345);

// x = p_k(M) b, the degree-k Chebyshev semi-iteration polynomial for the
// interval [a, b_up]; degree 0 is the Richardson step with weight 2/(a+b_up)
VectorXc chebyshev_apply(const ApplyFn& applyM, Real a, Real b_up, int degree, const VectorXc& rhs);

// relative error bound of the degree-k semi-iteration on [a, b_up]
Real chebyshev_error_bound(Real a, Real b_up, int degree);
// smallest degree whose bound is <= eps_target
int chebyshev_degree_for(Real a, Real b_up, Real eps_target);

// exact Hermitian average (A + A^H)/2; the result satisfies
// max|R - R^H| = 0 in floating point
SparseXc hermitianize(const SparseXc& A);

}  // namespace helmfosls
