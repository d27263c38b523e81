#pragma once

// Policy comparison and parameter sweeps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nfr/amc.hpp"
#include "nfr/config.hpp"
#include "nfr/lp_solve.hpp"

namespace nfr {

enum class PolicyKind {
  Greedy,         ///< P1: myopic row LPs
  LongSession,    ///< P2: optimal for uniformly clicking users
  PositionAware,  ///< P3: optimal for the scenario's click vector
  Baseline,       ///< top-N by similarity
};

/// "P1", "P2", "P3", "baseline".
const char* to_string(PolicyKind kind) noexcept;
/// Accepts the labels above (case-insensitive) and greedy/uni/pref.
PolicyKind parse_policy_kind(const std::string& name);

struct PolicyOutcome {
  PolicyKind kind;
  Policy policy;
  EvalReport eval;          ///< under the scenario's click model
  Vector achieved_quality;  ///< per row, in the policy's own quality measure
  Vector quality_target;    ///< q * ceiling per row
  std::optional<double> lp_objective;
  std::int64_t iterations = 0;
  std::optional<Backend> backend;
};

/// Computes and evaluates one policy. A uniform policy shown to
/// position-aware users puts row i of R/N in every slot, which leaves the
/// transition matrix unchanged, so its evaluation does not depend on v.
PolicyOutcome compute_policy(PolicyKind kind, const Scenario& scenario, const SolveOptions& opts = {});

/// (x - y) / y * 100; empty when y == 0.
std::optional<double> gain(double chr_x, double chr_y);

/// Hit rate of most-popular caching without recommendations, in percent:
/// 100 * sum of p0 over cached items (c_i == 0).
double mph(const Vector& popularity, const Vector& cost);

/// Zipf click vector over N slots whose normalized entropy equals `target`
/// (found by bisection on the exponent; 0 < target <= 1, N >= 2).
Vector clicks_with_entropy(int slots, double target);

enum class Axis { Quality, Slots, Alpha, Zipf, Entropy, Cache };

/// "q", "N", "alpha", "s", "Hv", "C".
const char* to_string(Axis axis) noexcept;
Axis parse_axis(const std::string& name);

/// The config with one axis set to `value`.
ScenarioConfig apply_axis(const ScenarioConfig& base, Axis axis, double value);

struct SweepSpec {
  ScenarioConfig base;
  Axis axis = Axis::Quality;
  std::vector<double> values;
  std::vector<PolicyKind> policies{PolicyKind::Greedy, PolicyKind::LongSession};
  std::vector<std::uint64_t> seeds;  ///< graph seeds; empty means base.seed
  PolicyKind reference = PolicyKind::Greedy;
  int workers = 1;
  bool timing = false;
  SolveOptions solve;
};

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::Greedy;
  std::string status = "ok";  ///< ok | infeasible | solver_error | invalid
  std::string message;
  std::optional<double> chr;
  double ltec = 0.0;
  std::optional<double> gain;
  double mph = 0.0;
  double hv = 0.0;
  double quality_min = 0.0;  ///< min_i achieved_i / target_i over rows with a target
  double wall_seconds = 0.0;
};

/// Runs every (value, seed) cell on up to `workers` threads. Rows come back
/// ordered by value, then seed, then the order of `policies`.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepSchema = "nfr-sweep v1";

/// CSV with a "# nfr-sweep v1 ..." comment line. The wall-time column is
/// only present when spec.timing is set, so default output is reproducible
/// byte for byte.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace nfr
