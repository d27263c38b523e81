#include "nfr/lp_solve.hpp"

#include <algorithm>

#include "nfr/amc.hpp"
#include "nfr/error.hpp"

namespace nfr {

const char* to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Auto: return "auto";
    case Backend::Dense: return "dense";
    case Backend::Decomposition: return "decomposition";
    case Backend::External: return "external";
  }
  return "unknown";
}

Backend parse_backend(const std::string& name) {
  if (name == "auto" || name == "builtin") return Backend::Auto;
  if (name == "dense") return Backend::Dense;
  if (name == "decomposition") return Backend::Decomposition;
  if (name == "external") return Backend::External;
  throw InvalidArgument("unknown solver '" + name + "'");
}

LpSolution solve(const LpProblem& lp, const SolveOptions& opts) {
  switch (opts.backend) {
    case Backend::External:
      return solve_external(lp, opts.external);
    case Backend::Decomposition:
      throw InvalidArgument("the decomposition backend only handles the long-session problems");
    case Backend::Auto:
    case Backend::Dense:
      break;
  }
  return solve_simplex(lp, opts.simplex);
}

namespace {

void require_optimal(const LpSolution& sol, const std::string& what) {
  switch (sol.status) {
    case LpStatus::Optimal:
      return;
    case LpStatus::Infeasible:
      throw Infeasible(what + " is infeasible" +
                       (sol.tightest_row.empty() ? std::string() : " (tightest row: " + sol.tightest_row + ")"));
    default:
      throw SolverError(what + ": solver returned " + to_string(sol.status));
  }
}

SolveResult solve_flow_lp(const Scenario& s, bool positional, const SolveOptions& opts) {
  const char* what = positional ? "position-aware LP" : "long-session LP";
  const int k = s.size();
  LpSolution sol;
  Backend used = opts.backend;
  int variables = NfrLayout(k, positional ? s.slots() : 1, positional).num_variables();
  // Same row set the flat builders emit.
  int rows = (positional ? s.slots() * k : k) + k + k + k * (k - 1);
  if (opts.backend == Backend::Auto || opts.backend == Backend::Decomposition) {
    try {
      sol = solve_decomposed(s, positional, opts.decomposition);
    } catch (const Infeasible& e) {
      throw Infeasible(std::string(what) + " is infeasible: " + e.what());
    }
    used = Backend::Decomposition;
  } else {
    const LpProblem lp = positional ? build_op_pref(s) : build_op_uni(s);
    sol = solve(lp, opts);
    variables = lp.num_variables();
    rows = lp.num_rows();
  }
  require_optimal(sol, what);
  RecoveredPolicy recovered = recover_policy(sol, s, positional);
  return SolveResult{std::move(recovered), std::move(sol), used, variables, rows};
}

}  // namespace

SolveResult solve_long_session(const Scenario& s, const SolveOptions& opts) {
  return solve_flow_lp(s, false, opts);
}

SolveResult solve_position_aware(const Scenario& s, const SolveOptions& opts) {
  return solve_flow_lp(s, true, opts);
}

SolveResult solve_greedy(const Scenario& s, const SolveOptions& opts) {
  SolveOptions row_opts = opts;
  if (row_opts.backend != Backend::External) row_opts.backend = Backend::Dense;
  const auto problems = build_greedy(s);
  std::vector<LpSolution> rows;
  rows.reserve(problems.size());
  LpSolution total;
  total.status = LpStatus::Optimal;
  int variables = 0;
  int row_count = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    rows.push_back(solve(problems[i], row_opts));
    require_optimal(rows.back(), "greedy row " + std::to_string(i));
    total.iterations += rows.back().iterations;
    total.objective += rows.back().objective;
    total.max_residual = std::max(total.max_residual, rows.back().max_residual);
    variables += problems[i].num_variables();
    row_count += problems[i].num_rows();
  }
  Policy policy = assemble_greedy(rows, s);
  // The visit rates come from the chain, not from the row problems.
  const EvalReport report = ltec(policy, s, 1e-6);
  const double obj = s.cost().dot(report.z);
  const double residual = policy_residual(policy, s);
  return SolveResult{RecoveredPolicy{std::move(policy), report.z, obj, report.ltec, residual}, std::move(total),
                     row_opts.backend, variables, row_count};
}

}  // namespace nfr
