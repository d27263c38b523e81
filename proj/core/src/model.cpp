#include "nfr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nfr/error.hpp"

namespace nfr {
namespace {

constexpr double kNormTol = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

// Items j != i ordered by decreasing similarity, ties by lowest index.
std::vector<int> ranked_items(const Matrix& u, int i) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(u.cols()));
  for (int j = 0; j < u.cols(); ++j)
    if (j != i) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return u(i, a) > u(i, b); });
  return idx;
}

// Slate positions ordered by decreasing click probability, ties by lowest index.
std::vector<int> ranked_positions(const Vector& v) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
  return idx;
}

void check_top_n_args(const Matrix& u, int slots) {
  require(u.rows() == u.cols(), "similarity matrix must be square");
  require(slots >= 1, "N must be at least 1");
  require(slots < u.rows(), "N must be smaller than the catalog size");
}

double row_dot(const Matrix& r, const Matrix& u, int i) {
  double s = 0.0;
  for (int j = 0; j < u.cols(); ++j) s += r(i, j) * u(i, j);
  return s;
}

Vector uniform_vector(int n) { return Vector::Constant(n, 1.0 / n); }

}  // namespace

Scenario::Scenario(Params p)
    : similarity_(std::move(p.similarity)),
      cost_(std::move(p.cost)),
      popularity_(std::move(p.popularity)),
      alpha_(p.alpha),
      slots_(p.slots),
      clicks_(std::move(p.clicks)),
      quality_(p.quality) {
  const auto k = popularity_.size();
  require(k >= 2, "catalog must contain at least two items");
  require(similarity_.rows() == k && similarity_.cols() == k,
          "similarity matrix must be K x K");
  require(cost_.size() == k, "cost vector must have K entries");
  similarity_.diagonal().setZero();
  require(similarity_.allFinite() && similarity_.minCoeff() >= 0.0 &&
              similarity_.maxCoeff() <= 1.0,
          "similarity scores must lie in [0,1]");
  require(cost_.allFinite() && cost_.minCoeff() >= 0.0, "costs must be nonnegative");
  require(popularity_.allFinite() && popularity_.minCoeff() > 0.0,
          "popularity must be strictly positive");
  require(std::abs(popularity_.sum() - 1.0) <= kNormTol, "popularity must sum to 1");
  require(alpha_ >= 0.0 && alpha_ < 1.0, "alpha must lie in [0,1)");
  require(slots_ >= 1 && slots_ < k, "N must satisfy 1 <= N <= K-1");
  if (clicks_.size() == 0) clicks_ = uniform_vector(slots_);
  require(clicks_.size() == slots_, "click vector must have N entries");
  require(clicks_.allFinite() && clicks_.minCoeff() >= 0.0 &&
              std::abs(clicks_.sum() - 1.0) <= kNormTol,
          "click vector must be a probability vector");
  require(quality_ >= 0.0 && quality_ <= 1.0, "q must lie in [0,1]");
}

bool Scenario::uniform_clicks() const noexcept {
  const double u = 1.0 / slots_;
  return (clicks_.array() - u).abs().maxCoeff() <= 1e-12;
}

bool Scenario::binary_costs() const noexcept {
  return (cost_.array() == 0.0 || cost_.array() == 1.0).all();
}

Scenario::Params Scenario::params() const {
  return Params{similarity_, cost_, popularity_, alpha_, slots_, clicks_, quality_};
}

Scenario Scenario::with_quality(double q) const {
  auto p = params();
  p.quality = q;
  return Scenario(std::move(p));
}

Scenario Scenario::with_alpha(double alpha) const {
  auto p = params();
  p.alpha = alpha;
  return Scenario(std::move(p));
}

Scenario Scenario::with_slots(int slots, Vector clicks) const {
  auto p = params();
  p.slots = slots;
  p.clicks = std::move(clicks);
  return Scenario(std::move(p));
}

Scenario Scenario::with_clicks(Vector clicks) const {
  auto p = params();
  p.clicks = std::move(clicks);
  return Scenario(std::move(p));
}

Scenario Scenario::with_cost(Vector cost) const {
  auto p = params();
  p.cost = std::move(cost);
  return Scenario(std::move(p));
}

Scenario Scenario::with_popularity(Vector popularity) const {
  auto p = params();
  p.popularity = std::move(popularity);
  return Scenario(std::move(p));
}

Policy Policy::uniform(Matrix r) {
  require(r.rows() == r.cols() && r.rows() > 0, "policy matrix must be square");
  std::vector<Matrix> m;
  m.push_back(std::move(r));
  return Policy(std::move(m), false);
}

Policy Policy::positional(std::vector<Matrix> per_position) {
  require(!per_position.empty(), "positional policy needs at least one position");
  const auto k = per_position.front().rows();
  for (const auto& m : per_position)
    require(m.rows() == k && m.cols() == k, "position matrices must all be K x K");
  return Policy(std::move(per_position), true);
}

const Matrix& Policy::matrix() const {
  if (positional_) throw InvalidArgument("positional policy has no single matrix");
  return positions_.front();
}

Policy spread_over_positions(const Policy& uniform, int slots) {
  require(!uniform.is_positional(), "expected a uniform policy");
  require(slots >= 1, "N must be at least 1");
  std::vector<Matrix> m(static_cast<std::size_t>(slots), uniform.matrix() / slots);
  return Policy::positional(std::move(m));
}

std::vector<Violation> validate_policy(const Policy& policy, const Scenario& s, double tol) {
  const int k = s.size();
  const int n_slots = s.slots();
  if (policy.size() != k)
    throw InvalidArgument("policy size does not match the catalog size");
  if (policy.is_positional() && policy.matrix_count() != n_slots)
    throw InvalidArgument("positional policy must have N position matrices");

  std::vector<Violation> out;
  auto report = [&](Violation::Kind kind, int pos, int row, int col, double mag,
                    const std::string& what) {
    std::ostringstream msg;
    msg << what;
    if (pos >= 0) msg << " (position " << pos << ")";
    msg << " at row " << row;
    if (col >= 0) msg << ", col " << col;
    msg << ": " << mag;
    out.push_back(Violation{kind, pos, row, col, mag, msg.str()});
  };

  const double row_target = policy.is_positional() ? 1.0 : static_cast<double>(n_slots);
  for (int n = 0; n < policy.matrix_count(); ++n) {
    const Matrix& r = policy.position(n);
    const int pos = policy.is_positional() ? n : -1;
    for (int i = 0; i < k; ++i) {
      if (std::abs(r(i, i)) > tol)
        report(Violation::Kind::Diagonal, pos, i, i, r(i, i), "diagonal nonzero");
      double sum = 0.0;
      for (int j = 0; j < k; ++j) {
        const double x = r(i, j);
        sum += x;
        if (!(x >= -tol && x <= 1.0 + tol))
          report(Violation::Kind::Bound, pos, i, j, x, "entry outside [0,1]");
      }
      if (!(std::abs(sum - row_target) <= tol))
        report(Violation::Kind::RowSum, pos, i, -1, sum - row_target, "row budget mismatch");
    }
  }

  if (policy.is_positional()) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        double sum = 0.0;
        for (const auto& r : policy.positions()) sum += r(i, j);
        if (sum > 1.0 + tol)
          report(Violation::Kind::SlotOverlap, -1, i, j, sum - 1.0,
                 "item shown in several slots");
      }
  }
  return out;
}

Policy baseline_policy(const Matrix& u, int slots, const Vector& clicks) {
  check_top_n_args(u, slots);
  const auto k = u.rows();
  if (clicks.size() == 0) {
    Matrix r = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      const auto ranked = ranked_items(u, i);
      for (int t = 0; t < slots; ++t) r(i, ranked[static_cast<std::size_t>(t)]) = 1.0;
    }
    return Policy::uniform(std::move(r));
  }
  require(clicks.size() == slots, "click vector must have N entries");
  const auto order = ranked_positions(clicks);
  std::vector<Matrix> m(static_cast<std::size_t>(slots), Matrix::Zero(k, k));
  for (int i = 0; i < k; ++i) {
    const auto ranked = ranked_items(u, i);
    for (int t = 0; t < slots; ++t)
      m[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])](
          i, ranked[static_cast<std::size_t>(t)]) = 1.0;
  }
  return Policy::positional(std::move(m));
}

// Both ceilings are accumulated in exactly the same order as quality_of so
// that the baseline policy reproduces them bit for bit.
Vector q_max(const Matrix& u, int slots) {
  const Policy base = baseline_policy(u, slots);
  Vector q(u.rows());
  for (int i = 0; i < u.rows(); ++i) q(i) = row_dot(base.matrix(), u, i);
  return q;
}

Vector q_max_positional(const Matrix& u, int slots, const Vector& clicks) {
  require(clicks.size() == slots, "click vector must have N entries");
  const Policy base = baseline_policy(u, slots, clicks);
  Vector q = Vector::Zero(u.rows());
  for (int i = 0; i < u.rows(); ++i)
    for (int n = 0; n < slots; ++n) q(i) += clicks(n) * row_dot(base.position(n), u, i);
  return q;
}

Vector quality_of(const Policy& policy, const Scenario& s) {
  const auto& u = s.similarity();
  if (policy.size() != s.size())
    throw InvalidArgument("policy size does not match the catalog size");
  Vector q = Vector::Zero(s.size());
  if (!policy.is_positional()) {
    for (int i = 0; i < s.size(); ++i) q(i) = row_dot(policy.matrix(), u, i);
    return q;
  }
  if (policy.matrix_count() != s.slots())
    throw InvalidArgument("positional policy must have N position matrices");
  for (int i = 0; i < s.size(); ++i)
    for (int n = 0; n < s.slots(); ++n)
      q(i) += s.clicks()(n) * row_dot(policy.position(n), u, i);
  return q;
}

Vector quality_ceiling(const Scenario& s, bool positional) {
  return positional ? q_max_positional(s.similarity(), s.slots(), s.clicks())
                    : q_max(s.similarity(), s.slots());
}

double entropy(const Vector& v) {
  require(v.size() >= 1, "click vector must be nonempty");
  require(v.allFinite() && v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= kNormTol,
          "click vector must be a probability vector");
  if (v.size() == 1) return 0.0;
  double h = 0.0;
  for (int n = 0; n < v.size(); ++n)
    if (v(n) > 0.0) h -= v(n) * std::log(v(n));
  return h / std::log(static_cast<double>(v.size()));
}

Vector zipf_clicks(int slots, double exponent) {
  require(slots >= 1, "N must be at least 1");
  require(exponent >= 0.0, "zipf exponent must be nonnegative");
  Vector v(slots);
  for (int n = 0; n < slots; ++n) v(n) = std::pow(n + 1.0, -exponent);
  return v / v.sum();
}

}  // namespace nfr
