#pragma once

// Backend selection for the three recommendation problems.

#include <string>

#include "nfr/decomposition.hpp"
#include "nfr/external_solver.hpp"
#include "nfr/lp_build.hpp"
#include "nfr/simplex.hpp"

namespace nfr {

enum class Backend {
  Auto,           ///< decomposition for the long-session LPs, dense simplex otherwise
  Dense,          ///< the full LP on the dense tableau
  Decomposition,  ///< column generation (long-session LPs only)
  External,       ///< subprocess hook on the full LP
};

const char* to_string(Backend backend) noexcept;
/// Parses "auto", "dense", "decomposition", "external" and "builtin" (= auto).
Backend parse_backend(const std::string& name);

struct SolveOptions {
  Backend backend = Backend::Auto;
  SimplexOptions simplex;
  DecompositionOptions decomposition;
  ExternalSolverOptions external;
};

/// Solves a general LP with the dense simplex or the external hook.
/// Status is reported, not thrown.
LpSolution solve(const LpProblem& lp, const SolveOptions& opts = {});

struct SolveResult {
  RecoveredPolicy recovered;
  LpSolution lp;     ///< for greedy: the sums over the row problems
  Backend backend;   ///< the backend that actually ran
  int variables = 0;
  int rows = 0;
};

/// P2: optimal long-session policy for uniformly clicking users.
/// Throws Infeasible (naming the tightest row when known) or SolverError.
SolveResult solve_long_session(const Scenario& scenario, const SolveOptions& opts = {});

/// P3: optimal long-session policy for position-aware users.
SolveResult solve_position_aware(const Scenario& scenario, const SolveOptions& opts = {});

/// P1: myopic policy from the K independent row LPs.
SolveResult solve_greedy(const Scenario& scenario, const SolveOptions& opts = {});

}  // namespace nfr
