#include "nfr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "nfr/amc.hpp"
#include "nfr/error.hpp"

namespace nfr {
namespace {

// Cumulative distribution over 0..n-1 for inverse-transform sampling.
class Cdf {
 public:
  Cdf() = default;
  template <typename Weights>
  explicit Cdf(const Weights& w) {
    cum_.resize(static_cast<std::size_t>(w.size()));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      acc += std::max(0.0, static_cast<double>(w[j]));
      cum_[static_cast<std::size_t>(j)] = acc;
    }
    last_ = static_cast<int>(cum_.size()) - 1;
    while (last_ > 0 && !(cum_[static_cast<std::size_t>(last_)] > cum_[static_cast<std::size_t>(last_ - 1)])) --last_;
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const int j = static_cast<int>(it - cum_.begin());
    return std::min(j, last_);
  }

 private:
  std::vector<double> cum_;
  int last_ = 0;
};

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

}  // namespace

SimReport simulate(const Policy& policy, const Scenario& s, std::int64_t steps, std::uint64_t seed) {
  if (steps < 1) throw InvalidArgument("simulate: steps must be >= 1");
  const auto violations = validate_policy(policy, s, 1e-6);
  if (!violations.empty()) throw InvalidPolicy("simulate: " + violations.front().message);

  const int k = s.size();
  const int mats = policy.matrix_count();
  const Cdf popularity(s.popularity());
  const Cdf slots = policy.is_positional() ? Cdf(s.clicks()) : Cdf();
  std::vector<Cdf> next(static_cast<std::size_t>(mats * k));
  for (int n = 0; n < mats; ++n)
    for (int i = 0; i < k; ++i)
      next[static_cast<std::size_t>(n * k + i)] = Cdf(policy.position(n).row(i));

  Rng rng(seed);
  const double alpha = s.alpha();
  const Vector& cost = s.cost();

  const std::int64_t batches = std::min<std::int64_t>(kSimBatches, steps);
  const std::int64_t batch_size = steps / batches;
  Welford batch_means;
  Welford cycle_lengths;
  double total = 0.0;
  double batch_sum = 0.0;
  std::int64_t in_batch = 0;
  std::int64_t cycle = 0;

  int state = popularity.draw(rng);
  for (std::int64_t t = 0; t < steps; ++t) {
    if (t > 0) {
      if (rng.uniform() < alpha) {
        const int n = policy.is_positional() ? slots.draw(rng) : 0;
        state = next[static_cast<std::size_t>(n * k + state)].draw(rng);
      } else {
        cycle_lengths.add(static_cast<double>(cycle));
        cycle = 0;
        state = popularity.draw(rng);
      }
    }
    ++cycle;
    const double c = cost(state);
    total += c;
    // The tail that does not fill a batch still counts toward the mean.
    if (static_cast<std::int64_t>(batch_means.n) < batches) {
      batch_sum += c;
      if (++in_batch == batch_size) {
        batch_means.add(batch_sum / static_cast<double>(batch_size));
        batch_sum = 0.0;
        in_batch = 0;
      }
    }
  }

  SimReport r;
  r.steps = steps;
  r.seed = seed;
  r.empirical_cost_rate = total / static_cast<double>(steps);
  if (s.binary_costs()) r.empirical_chr = 1.0 - r.empirical_cost_rate;
  r.std_error = std::sqrt(batch_means.variance() / static_cast<double>(batch_means.n));
  r.cycles = cycle_lengths.n;
  if (cycle_lengths.n > 0) {
    r.mean_cycle_length = cycle_lengths.mean;
    r.cycle_length_std_error = std::sqrt(cycle_lengths.variance() / static_cast<double>(cycle_lengths.n));
  } else {
    r.mean_cycle_length = static_cast<double>(cycle);
  }
  return r;
}

SimReport simulate_replicated(const Policy& policy, const Scenario& s, std::int64_t steps_each,
                              int replications, std::uint64_t seed, int workers) {
  if (replications < 1) throw InvalidArgument("simulate_replicated: replications must be >= 1");
  workers = std::clamp(workers, 1, replications);
  std::vector<SimReport> parts(static_cast<std::size_t>(replications));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto run = [&](int w) {
    try {
      for (int r = w; r < replications; r += workers)
        parts[static_cast<std::size_t>(r)] =
            simulate(policy, s, steps_each, derive_seed(seed, static_cast<std::uint64_t>(r)));
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Pooled estimate: replications are independent, so variances add with
  // squared weights.
  SimReport out;
  out.seed = seed;
  double var = 0.0;
  double cycle_var = 0.0;
  double cycle_sum = 0.0;
  for (const auto& p : parts) {
    out.steps += p.steps;
    out.cycles += p.cycles;
  }
  for (const auto& p : parts) {
    const double w = static_cast<double>(p.steps) / static_cast<double>(out.steps);
    out.empirical_cost_rate += w * p.empirical_cost_rate;
    var += w * w * p.std_error * p.std_error;
    if (out.cycles > 0) {
      const double wc = static_cast<double>(p.cycles) / static_cast<double>(out.cycles);
      cycle_sum += wc * p.mean_cycle_length;
      cycle_var += wc * wc * p.cycle_length_std_error * p.cycle_length_std_error;
    }
  }
  out.std_error = std::sqrt(var);
  out.mean_cycle_length = out.cycles > 0 ? cycle_sum : parts.front().mean_cycle_length;
  out.cycle_length_std_error = std::sqrt(cycle_var);
  if (s.binary_costs()) out.empirical_chr = 1.0 - out.empirical_cost_rate;
  return out;
}

BruteForceResult brute_force_optimum(const Scenario& s, std::int64_t cap) {
  const int k = s.size();
  const int n = s.slots();
  const Matrix& u = s.similarity();
  const Vector qmax = q_max(u, n);

  // Feasible N-subsets per row.
  std::vector<std::vector<std::vector<int>>> options(static_cast<std::size_t>(k));
  double total = 1.0;
  for (int i = 0; i < k; ++i) {
    std::vector<int> others;
    for (int j = 0; j < k; ++j)
      if (j != i) others.push_back(j);
    const double target = s.quality() * qmax(i);
    const double slack = 1e-12 * (1.0 + qmax(i));
    std::vector<bool> mask(others.size(), false);
    std::fill(mask.begin(), mask.begin() + n, true);
    do {
      std::vector<int> subset;
      double quality = 0.0;
      for (std::size_t t = 0; t < others.size(); ++t)
        if (mask[t]) {
          subset.push_back(others[t]);
          quality += u(i, others[t]);
        }
      if (quality >= target - slack) options[static_cast<std::size_t>(i)].push_back(std::move(subset));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    total *= static_cast<double>(options[static_cast<std::size_t>(i)].size());
    if (options[static_cast<std::size_t>(i)].empty()) return {};
  }
  if (total > static_cast<double>(cap))
    throw InvalidArgument("brute_force_optimum: " + std::to_string(static_cast<long long>(total)) +
                          " candidate policies exceed the cap");

  BruteForceResult best;
  std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
  Matrix r = Matrix::Zero(k, k);
  auto set_row = [&](int i, bool on) {
    for (int j : options[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]]) r(i, j) = on ? 1.0 : 0.0;
  };
  for (int i = 0; i < k; ++i) set_row(i, true);
  for (;;) {
    const Policy p = Policy::uniform(r);
    const double value = (1.0 - s.alpha()) * expected_cycle_cost(p, s);
    ++best.evaluated;
    if (!best.feasible || value < best.ltec) {
      best.feasible = true;
      best.ltec = value;
      best.policy = p;
    }
    // Odometer over the rows.
    int i = 0;
    for (; i < k; ++i) {
      set_row(i, false);
      auto& idx = pick[static_cast<std::size_t>(i)];
      if (++idx < options[static_cast<std::size_t>(i)].size()) {
        set_row(i, true);
        break;
      }
      idx = 0;
      set_row(i, true);
    }
    if (i == k) break;
  }
  return best;
}

std::vector<int> render_slate(const Vector& row, int slots, Rng& rng) {
  if (slots < 1) throw InvalidArgument("render_slate: N must be >= 1");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (row(j) < -1e-9 || row(j) > 1.0 + 1e-9) throw InvalidArgument("render_slate: entries must lie in [0,1]");
    sum += row(j);
  }
  if (std::abs(sum - slots) > 1e-6 * slots) throw InvalidArgument("render_slate: row must sum to N");

  // Item j owns [S_{j-1}, S_j) on a line of length N; one uniform offset u
  // selects the items covering u, u+1, ..., u+N-1.
  const double scale = slots / sum;
  const double u = rng.uniform();
  std::vector<int> out;
  double lo = 0.0;
  int next = 0;
  for (Eigen::Index j = 0; j < row.size() && next < slots; ++j) {
    const double hi = lo + std::clamp(row(j), 0.0, 1.0) * scale;
    while (next < slots && u + next < hi) {
      if (u + next >= lo) out.push_back(static_cast<int>(j));
      ++next;
    }
    lo = hi;
  }
  // Rounding can leave the last point just past the end.
  for (Eigen::Index j = row.size() - 1; static_cast<int>(out.size()) < slots && j >= 0; --j)
    if (row(j) > 0.0 && std::find(out.begin(), out.end(), static_cast<int>(j)) == out.end())
      out.push_back(static_cast<int>(j));
  return out;
}

std::vector<int> render_slate(const Vector& row, int slots, std::uint64_t seed) {
  Rng rng(seed);
  return render_slate(row, slots, rng);
}

std::vector<int> render_slate(const std::vector<Vector>& rows, Rng& rng) {
  if (rows.empty()) throw InvalidArgument("render_slate: no positions");
  const Eigen::Index k = rows.front().size();
  Vector total = Vector::Zero(k);
  for (const auto& r : rows) {
    if (r.size() != k) throw InvalidArgument("render_slate: position rows differ in length");
    total += r;
  }
  for (Eigen::Index j = 0; j < k; ++j)
    if (total(j) > 1.0 + 1e-6) throw InvalidArgument("render_slate: item shown in more than one slot on average");

  std::vector<int> out;
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  for (const auto& r : rows) {
    double mass = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      if (!used[static_cast<std::size_t>(j)]) mass += std::max(0.0, r(j));
    int chosen = -1;
    if (mass > 0.0) {
      double x = rng.uniform() * mass;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (used[static_cast<std::size_t>(j)] || r(j) <= 0.0) continue;
        chosen = static_cast<int>(j);
        x -= r(j);
        if (x < 0.0) break;
      }
    } else {
      // This slot's mass went to earlier slots: take the unused item most
      // recommended overall.
      for (Eigen::Index j = 0; j < k; ++j)
        if (!used[static_cast<std::size_t>(j)] && total(j) > 0.0 && (chosen < 0 || total(j) > total(chosen)))
          chosen = static_cast<int>(j);
    }
    if (chosen < 0) throw InvalidArgument("render_slate: not enough recommended items");
    used[static_cast<std::size_t>(chosen)] = true;
    out.push_back(chosen);
  }
  return out;
}

std::vector<int> render_slate(const std::vector<Vector>& rows, std::uint64_t seed) {
  Rng rng(seed);
  return render_slate(rows, rng);
}

}  // namespace nfr
