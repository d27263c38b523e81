#pragma once

// Monte Carlo oracle for recommendation-driven sessions, exhaustive search
// over deterministic policies, and slate rendering.

#include <cstdint>
#include <optional>
#include <vector>

#include "nfr/model.hpp"
#include "nfr/rng.hpp"

namespace nfr {

struct SimReport {
  std::int64_t steps = 0;
  double empirical_cost_rate = 0.0;
  std::optional<double> empirical_chr;  ///< only for binary costs
  double mean_cycle_length = 0.0;
  double std_error = 0.0;               ///< of the cost rate, by batch means
  double cycle_length_std_error = 0.0;  ///< over completed cycles
  std::int64_t cycles = 0;              ///< completed renewal cycles
  std::uint64_t seed = 0;
};

inline constexpr int kSimBatches = 100;

/// Simulates `steps` requests. The first request and every renewal draw from
/// p0; otherwise, with probability alpha, the next item follows the policy
/// (slot n ~ v then item j ~ R^n_i for position-aware policies, j with
/// probability r_ij / N for uniform ones). Throws InvalidPolicy if the
/// policy fails validation at 1e-6.
SimReport simulate(const Policy& policy, const Scenario& scenario, std::int64_t steps, std::uint64_t seed);

/// Runs `replications` independent simulations with seeds derived from
/// `seed`, on up to `workers` threads, and pools them. The result does not
/// depend on `workers`.
SimReport simulate_replicated(const Policy& policy, const Scenario& scenario, std::int64_t steps_each,
                              int replications, std::uint64_t seed, int workers = 1);

struct BruteForceResult {
  bool feasible = false;
  double ltec = 0.0;
  std::optional<Policy> policy;  ///< the best deterministic policy
  std::int64_t evaluated = 0;
};

/// Enumerates every deterministic uniform policy whose rows are N-subsets
/// meeting the quality target and returns the one with the lowest LTEC
/// (first found on ties). Throws InvalidArgument when the number of
/// candidate policies exceeds `cap`.
BruteForceResult brute_force_optimum(const Scenario& scenario, std::int64_t cap = 1'000'000);

/// Systematic (Madow) sample of N distinct items from a uniform policy row
/// (entries in [0,1] summing to N). Item j appears with probability r_j.
std::vector<int> render_slate(const Vector& row, int slots, Rng& rng);
std::vector<int> render_slate(const Vector& row, int slots, std::uint64_t seed);

/// Slate for a position-aware row: slot n draws from R^n_i restricted to
/// items not yet shown, renormalized. Per-slot marginals are not preserved;
/// use it for display only.
std::vector<int> render_slate(const std::vector<Vector>& rows, Rng& rng);
std::vector<int> render_slate(const std::vector<Vector>& rows, std::uint64_t seed);

}  // namespace nfr
