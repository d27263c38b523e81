#pragma once

// Linear programs for network-friendly recommendations.
//
// The long-session problem is nonconvex in R, but with the scaled visit
// rates z^T = p0^T (I - Q)^-1 and the flows f_ij = z_i r_ij it becomes
//
//   minimize   c^T z
//   subject to sum_j u_ij f_ij >= q q_max_i z_i        (quality)
//              sum_j f_ij = N z_i                      (budget)
//              f_ij <= z_i,  f_ij >= 0,  f_ii = 0      (box)
//              z_j - (alpha/N) sum_i f_ij = p0_j       (stationarity)
//
// and any optimum maps back to a policy through r_ij = f_ij / z_i, since
// p0 > 0 keeps every z_j strictly positive. The position-aware variant uses
// one flow matrix per slate position.

#include <vector>

#include "nfr/lp_problem.hpp"
#include "nfr/model.hpp"

namespace nfr {

/// Variable ordering shared by the builders and every solver backend:
/// [z_0..z_{K-1} | f (row-major, diagonal omitted) per position].
class NfrLayout {
 public:
  NfrLayout(int items, int positions, bool positional)
      : items_(items), positions_(positions), positional_(positional) {}

  static NfrLayout uniform(int items) { return NfrLayout(items, 1, false); }
  static NfrLayout positional(int items, int positions) { return NfrLayout(items, positions, true); }

  int items() const noexcept { return items_; }
  int positions() const noexcept { return positions_; }
  bool is_positional() const noexcept { return positional_; }

  int z(int i) const noexcept { return i; }
  /// Index of f^n_ij; requires i != j.
  int f(int n, int i, int j) const noexcept {
    return items_ + n * items_ * (items_ - 1) + i * (items_ - 1) + (j < i ? j : j - 1);
  }
  int num_variables() const noexcept { return items_ + positions_ * items_ * (items_ - 1); }

 private:
  int items_;
  int positions_;
  bool positional_;
};

/// Long-session problem for uniformly clicking users.
/// Rows: 2K equalities (budget, stationarity) and K + K(K-1) inequalities
/// (quality, f_ij <= z_i); diagonal flows are not variables.
LpProblem build_op_uni(const Scenario& scenario);

/// Long-session problem for position-aware users (click vector v).
/// Rows: NK + K equalities (per-slot budget, stationarity) and
/// K + K(K-1) inequalities (quality, sum_n f^n_ij <= z_i).
LpProblem build_op_pref(const Scenario& scenario);

/// Myopic next-request problem, one LP per catalog row over r_ij (j != i):
/// minimize sum_j r_ij c_j subject to quality, budget N and 0 <= r_ij <= 1.
std::vector<LpProblem> build_greedy(const Scenario& scenario);

/// Assembles the uniform policy from optimal solutions of build_greedy.
Policy assemble_greedy(const std::vector<LpSolution>& rows, const Scenario& scenario);

struct RecoveredPolicy {
  Policy policy;
  Vector z;
  double objective_value;  ///< c^T z
  double ltec;             ///< (1 - alpha) c^T z
  double residual;         ///< worst violation of the policy constraints
};

inline constexpr double kMinVisitRate = 1e-12;

/// r_ij = f_ij / z_i (r^n_ij = f^n_ij / z_i when positional). Throws
/// SolverError if the solution is not optimal or some z_i <= kMinVisitRate.
RecoveredPolicy recover_policy(const LpSolution& sol, const Scenario& scenario, bool positional);

/// Worst violation of the box, budget and quality constraints.
double policy_residual(const Policy& policy, const Scenario& scenario);

}  // namespace nfr
