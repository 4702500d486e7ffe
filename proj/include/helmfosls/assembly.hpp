#pragma once

#include <functional>
#include <memory>

#include "helmfosls/femspace.hpp"
#include "helmfosls/types.hpp"

namespace helmfosls {

// data for the scaled first-order system; null functions mean zero.
// g_flux carries the shared Neumann/Robin datum.
struct ProblemData {
  Real kappa = 1.0;
  std::function<Complex(const Vec2&)> f1;
  std::function<Vec2c(const Vec2&)> f2;
  std::function<Complex(const Vec2&)> g_dirichlet;
  // Neumann/Robin datum; receives position and outward unit normal
  std::function<Complex(const Vec2&, const Vec2&)> g_flux;
  bool has_exact = false;
  std::function<Complex(const Vec2&)> exact_phi;
  std::function<Vec2c(const Vec2&)> exact_u;
};

// discrete saddle system
//   [ M  B ] [v]   [q]
//   [ B^H 0] [u] = [0]
// with M the test-norm Gram (Hermitian positive definite), B the duality
// pairing against the rescaled trial basis, q the data functional.
struct SaddleSystem {
  Real kappa = 0.0;
  std::shared_ptr<const ConstrainedTestSpace> V;
  std::shared_ptr<const RescaledTrialBasis> U;
  SparseXc M;
  SparseXc B;
  VectorXc q;

  int n_test() const { return static_cast<int>(M.rows()); }
  int n_trial() const { return static_cast<int>(B.cols()); }
};

SaddleSystem assemble_system(std::shared_ptr<const ConstrainedTestSpace> V,
                             std::shared_ptr<const RescaledTrialBasis> U,
                             const ProblemData& data);

// test-norm Gram alone (exactly the M block of assemble_system)
SparseXc assemble_test_gram(const ConstrainedTestSpace& V, Real kappa);

// Gram matrix of the rescaled trial basis: block diagonal, three copies of
// the scaled scalar mass matrix
SparseXr assemble_trial_mass(const RescaledTrialBasis& U);
VectorXc apply_Mu(const SparseXr& MU, const VectorXc& z);

// dense principal submatrix M(dofs, dofs)
MatrixXc local_patch_gram(const SparseXc& M, const std::vector<int>& dofs);

}  // namespace helmfosls
