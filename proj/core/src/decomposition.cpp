#include "nfr/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nfr/error.hpp"
#include "nfr/lp_build.hpp"

namespace nfr {
namespace {

// Vertex of the row polytope minimizing sum_n v_n h_j r^n_j: the N items
// with the smallest keys, the smallest key in the most clicked slot.
// Ties fall to the lowest index.
struct VertexOracle {
  int row;
  int items;
  int slots;
  bool positional;
  std::vector<int> slot_order;  // slots by decreasing click probability

  std::vector<int> pick(const std::vector<double>& key, const std::vector<double>* tie) const {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(items));
    for (int j = 0; j < items; ++j)
      if (j != row) idx.push_back(j);
    auto less = [&](int a, int b) {
      const double ka = key[static_cast<std::size_t>(a)];
      const double kb = key[static_cast<std::size_t>(b)];
      if (ka != kb) return ka < kb;
      if (tie) {
        const double ta = (*tie)[static_cast<std::size_t>(a)];
        const double tb = (*tie)[static_cast<std::size_t>(b)];
        if (ta != tb) return ta < tb;
      }
      return a < b;
    };
    std::partial_sort(idx.begin(), idx.begin() + slots, idx.end(), less);
    idx.resize(static_cast<std::size_t>(slots));
    return idx;
  }

  // Dense point from the picked items (in increasing key order).
  std::vector<double> point(const std::vector<int>& picked) const {
    std::vector<double> r(static_cast<std::size_t>((positional ? slots : 1) * items), 0.0);
    for (int t = 0; t < slots; ++t) {
      const int j = picked[static_cast<std::size_t>(t)];
      const int n = positional ? slot_order[static_cast<std::size_t>(t)] : 0;
      r[static_cast<std::size_t>(n * items + j)] = 1.0;
    }
    return r;
  }
};

struct RowEval {
  const std::vector<double>& w;
  const std::vector<double>& u;
  const Vector& clicks;
  int items;
  bool positional;

  double weight(int n) const { return positional ? clicks(n) : 1.0; }

  double cost(const std::vector<double>& r) const {
    double s = 0.0;
    const int slots = positional ? static_cast<int>(clicks.size()) : 1;
    for (int n = 0; n < slots; ++n)
      for (int j = 0; j < items; ++j) {
        const double x = r[static_cast<std::size_t>(n * items + j)];
        if (x != 0.0) s += weight(n) * w[static_cast<std::size_t>(j)] * x;
      }
    return s;
  }
  double quality(const std::vector<double>& r) const {
    double s = 0.0;
    const int slots = positional ? static_cast<int>(clicks.size()) : 1;
    for (int n = 0; n < slots; ++n)
      for (int j = 0; j < items; ++j) {
        const double x = r[static_cast<std::size_t>(n * items + j)];
        if (x != 0.0) s += weight(n) * u[static_cast<std::size_t>(j)] * x;
      }
    return s;
  }
};

}  // namespace

RowPoint price_row(int row, const std::vector<double>& w, const std::vector<double>& u, int slots,
                   const Vector& clicks, double b) {
  const int items = static_cast<int>(w.size());
  if (static_cast<int>(u.size()) != items) throw InvalidArgument("price_row: size mismatch");
  if (slots < 1 || slots >= items) throw InvalidArgument("price_row: N must satisfy 1 <= N <= K-1");
  const bool positional = clicks.size() > 0;
  if (positional && clicks.size() != slots) throw InvalidArgument("price_row: click vector must have N entries");

  VertexOracle oracle{row, items, slots, positional, {}};
  if (positional) {
    oracle.slot_order.resize(static_cast<std::size_t>(slots));
    std::iota(oracle.slot_order.begin(), oracle.slot_order.end(), 0);
    std::stable_sort(oracle.slot_order.begin(), oracle.slot_order.end(),
                     [&](int a, int c) { return clicks(a) > clicks(c); });
  }
  const RowEval eval{w, u, clicks, items, positional};
  auto make = [&](std::vector<double> r) {
    RowPoint p;
    p.value = eval.cost(r);
    p.quality = eval.quality(r);
    p.r = std::move(r);
    return p;
  };

  RowPoint lo = make(oracle.point(oracle.pick(w, nullptr)));
  const double feas_slack = 1e-12 * std::max(1.0, std::abs(b));
  if (lo.quality >= b - feas_slack) return lo;

  // Most similar items first, cheapest among equally similar ones.
  std::vector<double> neg_u(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) neg_u[j] = -u[j];
  RowPoint hi = make(oracle.point(oracle.pick(neg_u, &w)));
  if (hi.quality < b - feas_slack) throw Infeasible("row " + std::to_string(row) + ": quality target unreachable");
  if (hi.quality <= lo.quality) return hi;

  std::vector<double> key(u.size());
  for (int iter = 0; iter < 1000; ++iter) {
    const double mu = (hi.value - lo.value) / (hi.quality - lo.quality);
    for (std::size_t j = 0; j < u.size(); ++j) key[j] = w[j] - mu * u[j];
    RowPoint x = make(oracle.point(oracle.pick(key, &neg_u)));
    const double lag_x = x.value - mu * x.quality;
    const double lag_lo = lo.value - mu * lo.quality;
    const double scale = 1.0 + std::abs(lo.value) + std::abs(mu) * std::abs(lo.quality);
    if (lag_x >= lag_lo - 1e-13 * scale) break;
    if (x.quality >= b - feas_slack)
      hi = std::move(x);
    else
      lo = std::move(x);
    if (hi.quality <= lo.quality) break;
  }
  if (hi.quality >= b - feas_slack && hi.quality - lo.quality <= 0.0) return hi;

  // Mix the two supporting vertices so that the quality row is tight.
  const double theta = std::clamp((b - lo.quality) / (hi.quality - lo.quality), 0.0, 1.0);
  RowPoint mix;
  mix.r.resize(lo.r.size());
  for (std::size_t k = 0; k < lo.r.size(); ++k) mix.r[k] = theta * hi.r[k] + (1.0 - theta) * lo.r[k];
  mix.value = eval.cost(mix.r);
  mix.quality = eval.quality(mix.r);
  return mix;
}

LpSolution solve_decomposed(const Scenario& s, bool positional, const DecompositionOptions& opts,
                            DecompositionStats* stats) {
  if (!(s.alpha() > 0.0)) throw InvalidArgument("the LP formulations need alpha in (0,1)");
  const int k = s.size();
  const int slots = s.slots();
  const int n_mats = positional ? slots : 1;
  const Vector clicks = positional ? s.clicks() : Vector();
  const Vector ceiling = quality_ceiling(s, positional);
  const Matrix& u = s.similarity();

  // Transition weight of slot n: alpha/N for uniform users, alpha v_n otherwise.
  auto slot_weight = [&](int n) { return positional ? s.alpha() * s.clicks()(n) : s.alpha() / slots; };

  struct ColumnInfo {
    int row;
    std::vector<double> r;
  };
  std::vector<ColumnInfo> columns;
  std::vector<std::set<std::vector<double>>> seen(static_cast<std::size_t>(k));

  auto column_entries = [&](int i, const std::vector<double>& r) {
    std::vector<double> coef(static_cast<std::size_t>(k), 0.0);
    coef[static_cast<std::size_t>(i)] = 1.0;
    for (int n = 0; n < n_mats; ++n)
      for (int j = 0; j < k; ++j) {
        const double x = r[static_cast<std::size_t>(n * k + j)];
        if (x != 0.0) coef[static_cast<std::size_t>(j)] -= slot_weight(n) * x;
      }
    std::vector<Term> t;
    for (int j = 0; j < k; ++j)
      if (coef[static_cast<std::size_t>(j)] != 0.0) t.push_back({j, coef[static_cast<std::size_t>(j)]});
    return t;
  };

  // Master with the top-N recommender as the starting column of every row.
  LpProblem master;
  const Policy base = baseline_policy(u, slots, clicks);
  std::vector<std::vector<Term>> initial_terms(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::vector<double> r(static_cast<std::size_t>(n_mats * k), 0.0);
    for (int n = 0; n < n_mats; ++n)
      for (int j = 0; j < k; ++j) r[static_cast<std::size_t>(n * k + j)] = base.position(n)(i, j);
    master.add_variable("lambda_" + std::to_string(i), s.cost()(i));
    initial_terms[static_cast<std::size_t>(i)] = column_entries(i, r);
    seen[static_cast<std::size_t>(i)].insert(r);
    columns.push_back({i, std::move(r)});
  }
  std::vector<std::vector<Term>> rows(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (const auto& t : initial_terms[static_cast<std::size_t>(i)])
      rows[static_cast<std::size_t>(t.var)].push_back({i, t.coef});
  for (int j = 0; j < k; ++j)
    master.add_equality("stationarity_" + std::to_string(j), std::move(rows[static_cast<std::size_t>(j)]),
                        s.popularity()(j));

  SimplexSolver solver(master, opts.master);
  LpSolution msol;
  DecompositionStats st;
  std::vector<double> w(static_cast<std::size_t>(k));
  std::vector<double> urow(static_cast<std::size_t>(k));
  for (;;) {
    msol = solver.solve();
    st.master_iterations = msol.iterations;
    if (msol.status != LpStatus::Optimal)
      throw SolverError(std::string("column-generation master is ") + to_string(msol.status));
    if (st.rounds >= opts.max_rounds) throw SolverError("column generation did not converge");
    ++st.rounds;

    const auto& y = msol.duals;
    for (int j = 0; j < k; ++j) w[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)];
    int added = 0;
    double min_rc = 0.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) urow[static_cast<std::size_t>(j)] = j == i ? 0.0 : u(i, j);
      RowPoint p = price_row(i, w, urow, slots, clicks, s.quality() * ceiling(i));
      const double scale = positional ? s.alpha() : s.alpha() / slots;
      const double rc = s.cost()(i) - y[static_cast<std::size_t>(i)] + scale * p.value;
      min_rc = std::min(min_rc, rc);
      const double tol = opts.reduced_cost_tol * (1.0 + std::abs(s.cost()(i)) + std::abs(y[static_cast<std::size_t>(i)]));
      if (rc >= -tol) continue;
      if (!seen[static_cast<std::size_t>(i)].insert(p.r).second) continue;
      solver.add_column(s.cost()(i), column_entries(i, p.r));
      columns.push_back({i, std::move(p.r)});
      ++added;
    }
    st.min_reduced_cost = min_rc;
    if (added == 0) break;
  }
  st.columns = static_cast<int>(columns.size());
  if (stats) *stats = st;

  const auto layout = positional ? NfrLayout::positional(k, slots) : NfrLayout::uniform(k);
  LpSolution out;
  out.status = LpStatus::Optimal;
  out.iterations = msol.iterations;
  out.x.assign(static_cast<std::size_t>(layout.num_variables()), 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double lambda = msol.x[c];
    if (lambda == 0.0) continue;
    const auto& col = columns[c];
    out.x[static_cast<std::size_t>(layout.z(col.row))] += lambda;
    for (int n = 0; n < n_mats; ++n)
      for (int j = 0; j < k; ++j) {
        const double x = col.r[static_cast<std::size_t>(n * k + j)];
        if (x != 0.0) out.x[static_cast<std::size_t>(layout.f(n, col.row, j))] += lambda * x;
      }
  }
  const LpProblem full = positional ? build_op_pref(s) : build_op_uni(s);
  out.objective = full.evaluate(out.x);
  out.max_residual = full.max_violation(out.x);
  return out;
}

}  // namespace nfr
