#pragma once

#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "helmfosls/assembly.hpp"
#include "helmfosls/mesh.hpp"
#include "helmfosls/types.hpp"

namespace helmfosls {

// Prolongation between constrained test spaces on nested meshes (fine built by
// refinement of coarse, same degree). Columns are the coarse basis functions
// expressed in the fine constrained coefficients. Throws NonNestedSpaces if
// the coarse functions cannot be reproduced in the fine space.
SparseXc test_space_prolongation(const ConstrainedTestSpace& coarse,
                                 const ConstrainedTestSpace& fine);

struct PrecondConfig {
  bool two_grid = false;  // solve the level below the finest exactly instead of recursing
  // smoothing sweeps per level (levels 1..L); empty means one sweep everywhere
  std::vector<int> smoothing_steps;
  enum class Condense { automatic, on, off };
  Condense condense = Condense::automatic;  // automatic: on for degree >= 4
};

struct PrecondStats {
  long long patch_visits = 0;
  long long patch_dof_visits = 0;
  long long cycles = 0;
};

// Hierarchical preconditioner for the test-space Gram matrix: exact solve on
// the coarsest mesh, multiplicative vertex-patch corrections restricted to the
// newly refined region on every finer level, arranged palindromically
// (forward sweeps, coarse correction, reversed sweeps) so the preconditioner
// is Hermitian and lambda_max(Q^{-1} M) = 1.
class TestPrecond {
 public:
  TestPrecond(std::shared_ptr<const MeshHierarchy> hier, int p_tilde, Real kappa,
              PrecondConfig cfg = {});

  VectorXc apply(const VectorXc& r) const;  // ~ M^{-1} r on the finest level

  int n_levels() const { return static_cast<int>(levels_.size()); }
  std::shared_ptr<const ConstrainedTestSpace> space(int level) const;
  std::shared_ptr<const ConstrainedTestSpace> fine_space() const { return space(n_levels() - 1); }
  const SparseXc& gram(int level) const;
  const SparseXc& prolongation(int level) const;  // maps level-1 into level
  bool condensed(int level) const;

  mutable PrecondStats stats;

 private:
  struct Patch {
    int vertex = -1;
    std::vector<int> dofs;  // constrained dof ids (skeleton only when condensed)
    Eigen::LLT<MatrixXc> solver;
    std::vector<int> tris;
  };
  struct Level {
    std::shared_ptr<const ConstrainedTestSpace> V;
    SparseXc M;
    SparseXc P;  // from the previous level
    std::vector<Patch> patches;
    int sweeps = 1;
    bool condensed = false;
    // per covered element: interior constrained dofs and their local factor
    std::vector<int> covered;                     // element ids, ascending
    std::vector<std::vector<int>> interior_dofs;  // indexed by element id
    std::vector<Eigen::LLT<MatrixXc>> interior_llt;  // indexed by covered position
    std::vector<int> covered_pos;                 // element id -> position or -1
  };

  VectorXc cycle(int level, const VectorXc& r) const;
  void patch_pass(const Level& L, VectorXc& z, VectorXc& rr, bool reverse) const;
  void interior_correct(const Level& L, VectorXc& z, VectorXc& rr) const;

  std::shared_ptr<const MeshHierarchy> hier_;
  std::vector<Level> levels_;
  Eigen::SimplicialLLT<SparseXc, Eigen::Lower> exact_;
  int exact_level_ = 0;
  Real kappa_ = 0.0;
};

// Preconditioner for the trial Gram matrix: identity, or a fixed-degree
// Chebyshev semi-iteration on a Lanczos-estimated spectral interval widened by
// 5% on each side.
class SchurPrecond {
 public:
  enum class Mode { identity, chebyshev };

  SchurPrecond(std::shared_ptr<const RescaledTrialBasis> U, Mode mode, Real eps_target = 0.1,
               unsigned seed = 12345);

  VectorXc apply(const VectorXc& r) const;

  Mode mode() const { return mode_; }
  Real interval_lo() const { return lo_; }
  Real interval_hi() const { return hi_; }
  int degree() const { return degree_; }
  const SparseXr& trial_gram() const { return MU_; }

 private:
  Mode mode_;
  SparseXr MU_;
  Real lo_ = 0.0, hi_ = 0.0;
  int degree_ = 0;
};

}  // namespace helmfosls
