#pragma once

// Dense two-phase primal simplex with native variable bounds.
//
// Columns are kept in a dense tableau, which is fine for the few thousand
// rows/columns this library produces at desk scale. Dantzig pricing is used
// until a run of degenerate pivots is detected, after which Bland's rule
// takes over until the objective strictly improves again.

#include <cstdint>
#include <memory>
#include <vector>

#include "nfr/lp_problem.hpp"

namespace nfr {

struct SimplexOptions {
  double feas_tol = 1e-8;
  double opt_tol = 1e-9;
  std::int64_t max_iters = 0;  ///< 0 picks a limit from the problem size
  int stall_limit = 50;        ///< degenerate pivots before switching to Bland
};

/// Incremental solver: columns may be appended between solves, in which case
/// the previous optimal basis is reused (used by column generation).
class SimplexSolver {
 public:
  explicit SimplexSolver(const LpProblem& lp, SimplexOptions opts = {});
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  /// Appends a column. `entries` index the rows of the original problem,
  /// equalities first then inequalities. Returns the new variable index.
  int add_column(double cost, const std::vector<Term>& entries, double lower = 0.0,
                 double upper = kInf);

  int num_variables() const noexcept;

  LpSolution solve();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
LpSolution solve_simplex(const LpProblem& lp, const SimplexOptions& opts = {});

}  // namespace nfr
