#include "nfr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "nfr/error.hpp"

namespace nfr {

const char* to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::Greedy: return "P1";
    case PolicyKind::LongSession: return "P2";
    case PolicyKind::PositionAware: return "P3";
    case PolicyKind::Baseline: return "baseline";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (n == "p1" || n == "greedy") return PolicyKind::Greedy;
  if (n == "p2" || n == "uni") return PolicyKind::LongSession;
  if (n == "p3" || n == "pref") return PolicyKind::PositionAware;
  if (n == "baseline") return PolicyKind::Baseline;
  throw InvalidArgument("unknown policy '" + name + "'");
}

PolicyOutcome compute_policy(PolicyKind kind, const Scenario& s, const SolveOptions& opts) {
  std::optional<SolveResult> solved;
  std::optional<Policy> policy;
  switch (kind) {
    case PolicyKind::Greedy: solved = solve_greedy(s, opts); break;
    case PolicyKind::LongSession: solved = solve_long_session(s, opts); break;
    case PolicyKind::PositionAware: solved = solve_position_aware(s, opts); break;
    case PolicyKind::Baseline:
      policy = baseline_policy(s.similarity(), s.slots(), s.uniform_clicks() ? Vector() : s.clicks());
      break;
  }
  if (solved) policy = solved->recovered.policy;

  PolicyOutcome out{kind, *policy, ltec(*policy, s), quality_of(*policy, s),
                    s.quality() * quality_ceiling(s, policy->is_positional()), {}, 0, {}};
  if (solved) {
    out.lp_objective = solved->lp.objective;
    out.iterations = solved->lp.iterations;
    out.backend = solved->backend;
  }
  return out;
}

std::optional<double> gain(double chr_x, double chr_y) {
  if (chr_y == 0.0) return std::nullopt;
  return (chr_x - chr_y) / chr_y * 100.0;
}

double mph(const Vector& popularity, const Vector& cost) {
  if (popularity.size() != cost.size()) throw InvalidArgument("mph: size mismatch");
  double hit = 0.0;
  for (Eigen::Index i = 0; i < cost.size(); ++i)
    if (cost(i) == 0.0) hit += popularity(i);
  return 100.0 * hit;
}

Vector clicks_with_entropy(int slots, double target) {
  if (slots < 2) throw InvalidArgument("clicks_with_entropy: needs N >= 2");
  if (!(target > 0.0 && target <= 1.0)) throw InvalidArgument("clicks_with_entropy: target must lie in (0, 1]");
  if (target == 1.0) return zipf_clicks(slots, 0.0);
  double lo = 0.0;
  double hi = 1.0;
  while (entropy(zipf_clicks(slots, hi)) > target) {
    hi *= 2.0;
    if (hi > 1e4) throw InvalidArgument("clicks_with_entropy: target entropy too small");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (entropy(zipf_clicks(slots, mid)) > target ? lo : hi) = mid;
  }
  return zipf_clicks(slots, 0.5 * (lo + hi));
}

const char* to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::Quality: return "q";
    case Axis::Slots: return "N";
    case Axis::Alpha: return "alpha";
    case Axis::Zipf: return "s";
    case Axis::Entropy: return "Hv";
    case Axis::Cache: return "C";
  }
  return "unknown";
}

Axis parse_axis(const std::string& name) {
  for (Axis a : {Axis::Quality, Axis::Slots, Axis::Alpha, Axis::Zipf, Axis::Entropy, Axis::Cache})
    if (name == to_string(a)) return a;
  throw InvalidArgument("unknown axis '" + name + "' (expected q, N, alpha, s, Hv or C)");
}

namespace {

int as_count(double value, const char* what) {
  if (value != std::floor(value) || value < 0 || value > std::numeric_limits<int>::max())
    throw InvalidArgument(std::string("axis ") + what + " takes nonnegative integers");
  return static_cast<int>(value);
}

}  // namespace

ScenarioConfig apply_axis(const ScenarioConfig& base, Axis axis, double value) {
  ScenarioConfig c = base;
  switch (axis) {
    case Axis::Quality: c.quality = value; break;
    case Axis::Alpha: c.alpha = value; break;
    case Axis::Slots: c.slots = as_count(value, "N"); break;
    case Axis::Zipf:
      if (c.popularity.size() > 0) throw InvalidArgument("axis s needs Zipf popularity, not an explicit p0");
      c.zipf_exponent = value;
      break;
    case Axis::Entropy:
      c.clicks.kind = ClickSpec::Kind::Explicit;
      c.clicks.values = clicks_with_entropy(c.slots, value);
      break;
    case Axis::Cache:
      if (c.cost.size() > 0) throw InvalidArgument("axis C needs placed caches, not an explicit c");
      c.cached = as_count(value, "C");
      break;
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw InvalidArgument("sweep: no axis values");
  if (spec.policies.empty()) throw InvalidArgument("sweep: no policies");
  const std::vector<std::uint64_t> seeds = spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;
  const std::size_t cells = spec.values.size() * seeds.size();
  const std::size_t per_cell = spec.policies.size();
  std::vector<SweepRow> rows(cells * per_cell);

  auto run_cell = [&](std::size_t cell) {
    const double value = spec.values[cell / seeds.size()];
    const std::uint64_t seed = seeds[cell % seeds.size()];
    SweepRow* out = &rows[cell * per_cell];
    for (std::size_t p = 0; p < per_cell; ++p) {
      out[p].value = value;
      out[p].seed = seed;
      out[p].policy = spec.policies[p];
    }
    auto fail_all = [&](const char* status, const std::string& msg) {
      for (std::size_t p = 0; p < per_cell; ++p) {
        out[p].status = status;
        out[p].message = msg;
      }
    };
    std::optional<Instance> inst;
    try {
      ScenarioConfig cfg = apply_axis(spec.base, spec.axis, value);
      cfg.seed = seed;
      inst.emplace(build_instance(cfg));
    } catch (const std::exception& e) {
      fail_all("invalid", e.what());
      return;
    }
    const Scenario& s = inst->scenario;
    const double hv = entropy(s.clicks());
    const double mph_value = s.binary_costs() ? mph(s.popularity(), s.cost()) : 0.0;

    std::map<PolicyKind, double> chr;
    auto evaluate = [&](PolicyKind kind, SweepRow& row) {
      row.hv = hv;
      row.mph = mph_value;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const PolicyOutcome o = compute_policy(kind, s, spec.solve);
        row.ltec = o.eval.ltec;
        row.chr = o.eval.chr;
        double qmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < o.quality_target.size(); ++i)
          if (o.quality_target(i) > 0.0) qmin = std::min(qmin, o.achieved_quality(i) / o.quality_target(i));
        row.quality_min = std::isfinite(qmin) ? qmin : 1.0;
        if (row.chr) chr[kind] = *row.chr;
      } catch (const Infeasible& e) {
        row.status = "infeasible";
        row.message = e.what();
      } catch (const SolverError& e) {
        row.status = "solver_error";
        row.message = e.what();
      } catch (const std::exception& e) {
        row.status = "invalid";
        row.message = e.what();
      }
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    for (std::size_t p = 0; p < per_cell; ++p) evaluate(spec.policies[p], out[p]);
    if (std::find(spec.policies.begin(), spec.policies.end(), spec.reference) == spec.policies.end()) {
      SweepRow scratch;
      evaluate(spec.reference, scratch);
    }
    const auto ref = chr.find(spec.reference);
    for (std::size_t p = 0; p < per_cell; ++p)
      if (out[p].chr && ref != chr.end()) out[p].gain = gain(*out[p].chr, ref->second);
  };

  const int workers = std::clamp(spec.workers, 1, static_cast<int>(cells));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t cell; (cell = next.fetch_add(1)) < cells;) run_cell(cell);
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "# " << kSweepSchema << " axis=" << to_string(spec.axis) << " reference=" << to_string(spec.reference) << "\n";
  os << "axis,value,seed,policy,status,chr,ltec,gain_pct,mph_pct,hv,quality_min";
  if (spec.timing) os << ",wall_s";
  os << ",message\n";
  for (const auto& r : rows) {
    os << to_string(spec.axis) << "," << r.value << "," << r.seed << "," << to_string(r.policy) << "," << r.status << ",";
    const bool ok = r.status == "ok";
    if (ok && r.chr) os << *r.chr;
    os << ",";
    if (ok) os << r.ltec;
    os << ",";
    if (ok && r.gain)
      os << *r.gain;
    else if (ok)
      os << "NA";
    os << "," << r.mph << "," << r.hv << ",";
    if (ok) os << r.quality_min;
    if (spec.timing) os << "," << r.wall_seconds;
    os << "," << csv_escape(r.message) << "\n";
  }
  out << os.str();
}

}  // namespace nfr
