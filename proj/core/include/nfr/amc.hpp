#pragma once

// Absorbing-Markov-chain evaluation of a recommendation policy.
//
// A session is a sequence of renewal cycles. Within a cycle the user moves
// between items with the transient matrix Q (alpha/N * R, or
// alpha * sum_n v_n R^n for position-aware users) and leaves the cycle with
// probability 1 - alpha at every step, after which the next item is drawn
// from p0. The fundamental matrix G = (I - Q)^-1 counts expected visits.

#include <optional>

#include "nfr/model.hpp"

namespace nfr {

struct EvalReport {
  double ltec = 0.0;          ///< expected cost per request
  std::optional<double> chr;  ///< 1 - ltec, only for binary costs
  Vector z;                   ///< z^T = p0^T G (scaled visit rates)
  Vector g_row_sums;          ///< G 1, equals 1/(1-alpha) for valid policies
  double cycle_length = 0.0;  ///< p0^T G 1
};

/// Q for the policy variant: (alpha/N) R or alpha * sum_n v_n R^n.
Matrix transient_matrix(const Policy& policy, const Scenario& scenario);

/// G = (I - Q)^-1 via an LU solve against the identity.
Matrix fundamental_matrix(const Policy& policy, const Scenario& scenario);

/// p0^T G c: expected cost accumulated during one renewal cycle.
double expected_cycle_cost(const Policy& policy, const Scenario& scenario);

/// 1 / (1 - alpha). Throws InvalidArgument unless 0 <= alpha < 1.
double expected_cycle_length(double alpha);

/// Long-term expected cost (1 - alpha) p0^T G c together with visit rates
/// and the cache hit rate. The policy must pass validate_policy at
/// `tol`; otherwise InvalidPolicy is thrown.
EvalReport ltec(const Policy& policy, const Scenario& scenario, double tol = 1e-6);

}  // namespace nfr
