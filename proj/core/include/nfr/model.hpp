#pragma once

// Domain types: problem instances (scenarios), recommendation policies,
// quality accounting and the click-entropy metric.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nfr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default feasibility tolerance for policy validation.
inline constexpr double kFeasTol = 1e-7;

/// Immutable problem instance.
///
/// Holds the catalog similarity matrix U (K x K, zero diagonal), per-item
/// access costs c, the popularity vector p0 used when the user ignores
/// recommendations, the probability alpha of following recommendations,
/// the slate size N, the per-position click probabilities v and the
/// quality fraction q.
class Scenario {
 public:
  struct Params {
    Matrix similarity;
    Vector cost;
    Vector popularity;
    double alpha = 0.0;
    int slots = 1;
    Vector clicks;  ///< empty means uniform 1/N
    double quality = 0.0;
  };

  /// Validates and normalizes `params`; the diagonal of U is forced to zero.
  /// Throws InvalidArgument on any violated invariant.
  explicit Scenario(Params params);

  int size() const noexcept { return static_cast<int>(popularity_.size()); }
  const Matrix& similarity() const noexcept { return similarity_; }
  const Vector& cost() const noexcept { return cost_; }
  const Vector& popularity() const noexcept { return popularity_; }
  double alpha() const noexcept { return alpha_; }
  int slots() const noexcept { return slots_; }
  const Vector& clicks() const noexcept { return clicks_; }
  double quality() const noexcept { return quality_; }

  /// True when every click probability equals 1/N.
  bool uniform_clicks() const noexcept;
  /// True when every cost is exactly 0 or 1 (cache hit/miss costs).
  bool binary_costs() const noexcept;

  Params params() const;

  Scenario with_quality(double q) const;
  Scenario with_alpha(double alpha) const;
  /// Replaces N and the click vector together (empty clicks means uniform).
  Scenario with_slots(int slots, Vector clicks = {}) const;
  Scenario with_clicks(Vector clicks) const;
  Scenario with_cost(Vector cost) const;
  Scenario with_popularity(Vector popularity) const;

 private:
  Matrix similarity_;
  Vector cost_;
  Vector popularity_;
  double alpha_;
  int slots_;
  Vector clicks_;
  double quality_;
};

/// A recommendation policy: either one K x K matrix R whose rows sum to N
/// (uniform clicking), or N row-stochastic K x K matrices R^1..R^N, one per
/// slate position.
class Policy {
 public:
  static Policy uniform(Matrix r);
  static Policy positional(std::vector<Matrix> per_position);

  bool is_positional() const noexcept { return positional_; }
  int size() const noexcept { return static_cast<int>(positions_.front().rows()); }
  /// Number of stored matrices (1 for the uniform variant).
  int matrix_count() const noexcept { return static_cast<int>(positions_.size()); }

  /// The uniform matrix R. Throws InvalidArgument for positional policies.
  const Matrix& matrix() const;
  /// Position matrix R^n, 0-based. For uniform policies only n == 0 is valid.
  const Matrix& position(int n) const { return positions_.at(static_cast<std::size_t>(n)); }
  const std::vector<Matrix>& positions() const noexcept { return positions_; }

 private:
  Policy(std::vector<Matrix> m, bool positional)
      : positions_(std::move(m)), positional_(positional) {}

  std::vector<Matrix> positions_;
  bool positional_ = false;
};

/// Re-expresses a uniform policy for a position-aware user without using
/// any position information: every slot shows row i of R / N. The induced
/// transition matrix is identical to the uniform one for any click vector.
Policy spread_over_positions(const Policy& uniform, int slots);

struct Violation {
  enum class Kind { Diagonal, Bound, RowSum, SlotOverlap };
  Kind kind;
  int position;  ///< -1 for uniform policies
  int row;
  int col;       ///< -1 for row-level violations
  double magnitude;
  std::string message;
};

/// Checks the policy invariants within `tol`. Throws InvalidArgument on a
/// dimension mismatch with the scenario.
std::vector<Violation> validate_policy(const Policy& policy, const Scenario& scenario,
                                       double tol = kFeasTol);

/// Per-item maximum quality: the sum of the N largest similarities in row i.
Vector q_max(const Matrix& similarity, int slots);

/// Position-weighted maximum quality: the n-th largest click probability is
/// paired with the n-th largest similarity.
Vector q_max_positional(const Matrix& similarity, int slots, const Vector& clicks);

/// Top-N recommender. With empty `clicks` returns the uniform indicator
/// policy; otherwise returns the positional policy that places the most
/// similar item in the most clicked slot, and so on. Ties go to the lowest
/// index.
Policy baseline_policy(const Matrix& similarity, int slots, const Vector& clicks = {});

/// Achieved quality per row: sum_j r_ij u_ij (uniform) or
/// sum_n v_n sum_j r^n_ij u_ij (positional).
Vector quality_of(const Policy& policy, const Scenario& scenario);

/// The quality ceiling that matches the policy variant.
Vector quality_ceiling(const Scenario& scenario, bool positional);

/// Click entropy normalized by log N (uniform clicks give 1). N == 1 gives 0.
double entropy(const Vector& clicks);

/// Zipf distribution over N slate positions with exponent s.
Vector zipf_clicks(int slots, double exponent);

}  // namespace nfr
