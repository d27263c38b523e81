#include "nfr/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "nfr/error.hpp"

namespace nfr {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTie = 1e-12;

enum class ColKind : std::uint8_t { Structural, Slack, Artificial };
enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Column {
  ColKind kind;
  double cost;
  double lower;
  double upper;
  std::vector<Term> entries;  // row index + coefficient in the unscaled system
};

}  // namespace

struct SimplexSolver::Impl {
  SimplexOptions opts;
  int m = 0;
  std::vector<double> rhs;
  std::vector<std::string> row_names;
  std::vector<bool> row_is_eq;

  std::vector<Column> cols;
  std::vector<int> user_cols;  // user variable index -> internal column

  // Tableau state, valid once `have_basis` is set.
  bool have_basis = false;
  std::size_t stride = 0;
  std::vector<double> tab;  // m x stride, row-major
  std::vector<VarState> state;
  std::vector<double> value;  // nonbasic values (basic entries unused)
  std::vector<int> basic;     // basic column of each row
  std::vector<double> xb;     // basic values
  std::vector<int> init_col;  // identity column of each row in the scaled system
  std::vector<double> scale;  // row scaling D (+1/-1)
  std::vector<double> d;      // reduced costs of the current phase
  std::int64_t iterations = 0;

  double& at(int i, int j) { return tab[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j)]; }
  double at(int i, int j) const {
    return tab[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j)];
  }
  int ncols() const { return static_cast<int>(cols.size()); }

  static double start_value(const Column& c, VarState& st) {
    if (std::isfinite(c.lower)) {
      st = VarState::AtLower;
      return c.lower;
    }
    if (std::isfinite(c.upper)) {
      st = VarState::AtUpper;
      return c.upper;
    }
    st = VarState::FreeZero;
    return 0.0;
  }

  void reserve_columns(std::size_t need) {
    if (need <= stride) return;
    std::size_t next = std::max<std::size_t>(need, stride * 2 + 16);
    std::vector<double> grown(static_cast<std::size_t>(m) * next, 0.0);
    for (int i = 0; i < m; ++i)
      std::copy_n(tab.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(i) * stride),
                  ncols(), grown.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(i) * next));
    tab.swap(grown);
    stride = next;
  }

  // Tableau column of an unscaled sparse column: B_s^-1 D a.
  void write_tableau_column(int j) {
    for (int i = 0; i < m; ++i) at(i, j) = 0.0;
    for (const auto& t : cols[static_cast<std::size_t>(j)].entries) {
      const double w = scale[static_cast<std::size_t>(t.var)] * t.coef;
      const int ic = init_col[static_cast<std::size_t>(t.var)];
      for (int i = 0; i < m; ++i) at(i, j) += at(i, ic) * w;
    }
  }

  void build_initial_basis() {
    // Drop artificials from any previous attempt.
    std::vector<Column> kept;
    std::vector<int> remap(cols.size(), -1);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (cols[j].kind != ColKind::Artificial) {
        remap[j] = static_cast<int>(kept.size());
        kept.push_back(std::move(cols[j]));
      }
    cols.swap(kept);
    for (auto& u : user_cols) u = remap[static_cast<std::size_t>(u)];

    const int n0 = ncols();
    state.assign(static_cast<std::size_t>(n0), VarState::AtLower);
    value.assign(static_cast<std::size_t>(n0), 0.0);
    std::vector<double> resid = rhs;
    std::vector<int> slack_of(static_cast<std::size_t>(m), -1);
    for (int j = 0; j < n0; ++j) {
      auto& c = cols[static_cast<std::size_t>(j)];
      value[static_cast<std::size_t>(j)] = start_value(c, state[static_cast<std::size_t>(j)]);
      for (const auto& t : c.entries) resid[static_cast<std::size_t>(t.var)] -= t.coef * value[static_cast<std::size_t>(j)];
      if (c.kind == ColKind::Slack) slack_of[static_cast<std::size_t>(c.entries.front().var)] = j;
    }

    init_col.assign(static_cast<std::size_t>(m), -1);
    scale.assign(static_cast<std::size_t>(m), 1.0);
    basic.assign(static_cast<std::size_t>(m), -1);
    xb.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      const double r = resid[static_cast<std::size_t>(i)];
      const int s = slack_of[static_cast<std::size_t>(i)];
      if (s >= 0 && r >= 0.0) {
        init_col[static_cast<std::size_t>(i)] = s;
      } else {
        scale[static_cast<std::size_t>(i)] = r < 0.0 ? -1.0 : 1.0;
        cols.push_back(Column{ColKind::Artificial, 0.0, 0.0, kInf,
                              {Term{i, scale[static_cast<std::size_t>(i)]}}});
        state.push_back(VarState::AtLower);
        value.push_back(0.0);
        init_col[static_cast<std::size_t>(i)] = ncols() - 1;
      }
      const int b = init_col[static_cast<std::size_t>(i)];
      basic[static_cast<std::size_t>(i)] = b;
      state[static_cast<std::size_t>(b)] = VarState::Basic;
      xb[static_cast<std::size_t>(i)] = std::abs(r);
    }

    stride = static_cast<std::size_t>(ncols()) + 16;
    tab.assign(static_cast<std::size_t>(m) * stride, 0.0);
    for (int j = 0; j < ncols(); ++j)
      for (const auto& t : cols[static_cast<std::size_t>(j)].entries)
        at(t.var, j) = scale[static_cast<std::size_t>(t.var)] * t.coef;
    have_basis = true;
  }

  // Recomputes basic values from the nonbasic ones: x_B = B_s^-1 D (b - A_N x_N).
  void refresh_basic_values() {
    std::vector<double> r = rhs;
    for (int j = 0; j < ncols(); ++j) {
      if (state[static_cast<std::size_t>(j)] == VarState::Basic) continue;
      const double x = value[static_cast<std::size_t>(j)];
      if (x == 0.0) continue;
      for (const auto& t : cols[static_cast<std::size_t>(j)].entries) r[static_cast<std::size_t>(t.var)] -= t.coef * x;
    }
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k)
        s += at(i, init_col[static_cast<std::size_t>(k)]) * scale[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)];
      xb[static_cast<std::size_t>(i)] = s;
    }
  }

  void compute_reduced_costs(const std::vector<double>& cost) {
    d.assign(static_cast<std::size_t>(ncols()), 0.0);
    for (int j = 0; j < ncols(); ++j) d[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) {
      const double cb = cost[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])];
      if (cb == 0.0) continue;
      const double* row = &tab[static_cast<std::size_t>(i) * stride];
      for (int j = 0; j < ncols(); ++j) d[static_cast<std::size_t>(j)] -= cb * row[j];
    }
  }

  void pivot(int r, int q) {
    const std::size_t n = static_cast<std::size_t>(ncols());
    double* prow = &tab[static_cast<std::size_t>(r) * stride];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < n; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double* row = &tab[static_cast<std::size_t>(i) * stride];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d[static_cast<std::size_t>(q)];
    if (f != 0.0) {
      for (std::size_t j = 0; j < n; ++j) d[j] -= f * prow[j];
      d[static_cast<std::size_t>(q)] = 0.0;
    }
  }

  enum class PhaseResult { Optimal, Unbounded, IterationLimit };

  PhaseResult run_phase(const std::vector<double>& cost, std::int64_t max_iters) {
    compute_reduced_costs(cost);
    int degenerate = 0;
    bool bland = false;
    const double tol = opts.opt_tol;
    for (;;) {
      if (iterations >= max_iters) return PhaseResult::IterationLimit;

      // Pricing.
      int q = -1;
      double best = 0.0;
      double dir = 0.0;
      for (int j = 0; j < ncols(); ++j) {
        const auto st = state[static_cast<std::size_t>(j)];
        if (st == VarState::Basic) continue;
        const auto& c = cols[static_cast<std::size_t>(j)];
        if (c.lower == c.upper) continue;
        const double dj = d[static_cast<std::size_t>(j)];
        double score = 0.0;
        double s = 0.0;
        if ((st == VarState::AtLower || st == VarState::FreeZero) && dj < -tol) {
          score = -dj;
          s = 1.0;
        } else if ((st == VarState::AtUpper || st == VarState::FreeZero) && dj > tol) {
          score = dj;
          s = -1.0;
        } else {
          continue;
        }
        if (bland) {
          q = j;
          dir = s;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dir = s;
        }
      }
      if (q < 0) return PhaseResult::Optimal;

      // Ratio test.
      const auto& cq = cols[static_cast<std::size_t>(q)];
      const double flip_dist =
          (std::isfinite(cq.lower) && std::isfinite(cq.upper)) ? cq.upper - cq.lower : kInf;
      int leave = -1;
      double leave_alpha = 0.0;
      double best_ratio = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = at(i, q) * dir;
        if (std::abs(a) <= kPivotTol) continue;
        const auto& cb = cols[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])];
        const double xi = xb[static_cast<std::size_t>(i)];
        double ratio;
        if (a > 0.0) {
          if (!std::isfinite(cb.lower)) continue;
          ratio = (xi - cb.lower) / a;
        } else {
          if (!std::isfinite(cb.upper)) continue;
          ratio = (cb.upper - xi) / (-a);
        }
        ratio = std::max(ratio, 0.0);
        bool take = false;
        if (leave < 0 || ratio < best_ratio - kRatioTie) {
          take = true;
        } else if (ratio <= best_ratio + kRatioTie) {
          take = bland ? basic[static_cast<std::size_t>(i)] < basic[static_cast<std::size_t>(leave)]
                       : std::abs(a) > std::abs(leave_alpha);
        }
        if (take) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
          leave_alpha = a;
        }
      }

      if (leave < 0 && !std::isfinite(flip_dist)) return PhaseResult::Unbounded;
      const bool flip = leave < 0 || flip_dist <= best_ratio;
      const double theta = flip ? flip_dist : best_ratio;
      ++iterations;

      for (int i = 0; i < m; ++i) {
        const double a = at(i, q) * dir;
        if (a != 0.0) xb[static_cast<std::size_t>(i)] -= theta * a;
      }
      if (flip) {
        state[static_cast<std::size_t>(q)] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        value[static_cast<std::size_t>(q)] = dir > 0 ? cq.upper : cq.lower;
      } else {
        const int out = basic[static_cast<std::size_t>(leave)];
        const auto& co = cols[static_cast<std::size_t>(out)];
        if (leave_alpha > 0.0) {
          state[static_cast<std::size_t>(out)] = VarState::AtLower;
          value[static_cast<std::size_t>(out)] = co.lower;
        } else {
          state[static_cast<std::size_t>(out)] = VarState::AtUpper;
          value[static_cast<std::size_t>(out)] = co.upper;
        }
        const double entering = value[static_cast<std::size_t>(q)] + dir * theta;
        basic[static_cast<std::size_t>(leave)] = q;
        state[static_cast<std::size_t>(q)] = VarState::Basic;
        xb[static_cast<std::size_t>(leave)] = entering;
        pivot(leave, q);
      }

      if (theta <= kRatioTie) {
        if (++degenerate >= opts.stall_limit) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

  std::vector<double> phase_costs(bool phase_one) const {
    std::vector<double> c(static_cast<std::size_t>(ncols()), 0.0);
    for (int j = 0; j < ncols(); ++j) {
      const auto& col = cols[static_cast<std::size_t>(j)];
      if (phase_one)
        c[static_cast<std::size_t>(j)] = col.kind == ColKind::Artificial ? 1.0 : 0.0;
      else if (col.kind == ColKind::Structural)
        c[static_cast<std::size_t>(j)] = col.cost;
    }
    return c;
  }

  bool basis_primal_feasible() const {
    for (int i = 0; i < m; ++i) {
      const auto& c = cols[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])];
      const double x = xb[static_cast<std::size_t>(i)];
      if (x < c.lower - opts.feas_tol || x > c.upper + opts.feas_tol) return false;
    }
    return true;
  }

  double artificial_sum(int* worst_row) const {
    double s = 0.0;
    double worst = -1.0;
    for (int i = 0; i < m; ++i) {
      const auto& c = cols[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])];
      if (c.kind != ColKind::Artificial) continue;
      const double x = xb[static_cast<std::size_t>(i)];
      s += x;
      if (x > worst) {
        worst = x;
        if (worst_row) *worst_row = i;
      }
    }
    return s;
  }

  void retire_artificials() {
    for (int i = 0; i < m; ++i) {
      const int b = basic[static_cast<std::size_t>(i)];
      if (cols[static_cast<std::size_t>(b)].kind != ColKind::Artificial) continue;
      int best = -1;
      double mag = 1e-7;
      for (int j = 0; j < ncols(); ++j) {
        const auto& c = cols[static_cast<std::size_t>(j)];
        if (c.kind == ColKind::Artificial || state[static_cast<std::size_t>(j)] == VarState::Basic ||
            c.lower == c.upper)
          continue;
        if (std::abs(at(i, j)) > mag) {
          mag = std::abs(at(i, j));
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row; the artificial stays basic at zero
      d.assign(static_cast<std::size_t>(ncols()), 0.0);
      state[static_cast<std::size_t>(b)] = VarState::AtLower;
      value[static_cast<std::size_t>(b)] = 0.0;
      basic[static_cast<std::size_t>(i)] = best;
      state[static_cast<std::size_t>(best)] = VarState::Basic;
      pivot(i, best);
    }
    for (auto& c : cols)
      if (c.kind == ColKind::Artificial) c.upper = 0.0;
    refresh_basic_values();
  }

  LpSolution finish(LpStatus status, const std::string& tight = {}) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations;
    sol.tightest_row = tight;
    std::vector<double> full(static_cast<std::size_t>(ncols()), 0.0);
    for (int j = 0; j < ncols(); ++j)
      if (state[static_cast<std::size_t>(j)] != VarState::Basic) full[static_cast<std::size_t>(j)] = value[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) full[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])] = xb[static_cast<std::size_t>(i)];
    // Snap values within tolerance of a bound onto it.
    for (int j = 0; j < ncols(); ++j) {
      const auto& c = cols[static_cast<std::size_t>(j)];
      auto& x = full[static_cast<std::size_t>(j)];
      if (x < c.lower && x > c.lower - opts.feas_tol) x = c.lower;
      if (x > c.upper && x < c.upper + opts.feas_tol) x = c.upper;
    }
    sol.x.reserve(user_cols.size());
    for (int u : user_cols) sol.x.push_back(full[static_cast<std::size_t>(u)]);

    for (int u : user_cols) sol.objective += cols[static_cast<std::size_t>(u)].cost * full[static_cast<std::size_t>(u)];

    // Residuals of the original rows and bounds.
    std::vector<double> lhs(static_cast<std::size_t>(m), 0.0);
    double worst = 0.0;
    for (int j = 0; j < ncols(); ++j) {
      const auto& c = cols[static_cast<std::size_t>(j)];
      if (c.kind == ColKind::Artificial) continue;
      for (const auto& t : c.entries) lhs[static_cast<std::size_t>(t.var)] += t.coef * full[static_cast<std::size_t>(j)];
      worst = std::max({worst, c.lower - full[static_cast<std::size_t>(j)], full[static_cast<std::size_t>(j)] - c.upper});
    }
    for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(lhs[static_cast<std::size_t>(i)] - rhs[static_cast<std::size_t>(i)]));
    sol.max_residual = worst;

    if (status == LpStatus::Optimal) {
      const auto cost = phase_costs(false);
      sol.duals.assign(static_cast<std::size_t>(m), 0.0);
      for (int k = 0; k < m; ++k) {
        double y = 0.0;
        const int ic = init_col[static_cast<std::size_t>(k)];
        for (int i = 0; i < m; ++i) y += cost[static_cast<std::size_t>(basic[static_cast<std::size_t>(i)])] * at(i, ic);
        sol.duals[static_cast<std::size_t>(k)] = y * scale[static_cast<std::size_t>(k)];
      }
    }
    return sol;
  }

  LpSolution solve() {
    const std::int64_t budget =
        opts.max_iters > 0 ? opts.max_iters : std::max<std::int64_t>(10000, 50LL * (m + ncols()));
    const std::int64_t limit = iterations + budget;

    bool warm = false;
    if (have_basis) {
      refresh_basic_values();
      warm = basis_primal_feasible();
    }
    if (!warm) {
      build_initial_basis();
      double bnorm = 1.0;
      for (double b : rhs) bnorm = std::max(bnorm, std::abs(b));
      if (run_phase(phase_costs(true), limit) == PhaseResult::IterationLimit)
        return finish(LpStatus::IterationLimit);
      refresh_basic_values();
      int worst = -1;
      if (artificial_sum(&worst) > opts.feas_tol * bnorm) {
        have_basis = false;
        return finish(LpStatus::Infeasible,
                      worst >= 0 ? row_names[static_cast<std::size_t>(worst)] : std::string{});
      }
      retire_artificials();
    }
    const auto result = run_phase(phase_costs(false), limit);
    refresh_basic_values();
    if (result == PhaseResult::Unbounded) return finish(LpStatus::Unbounded);
    if (result == PhaseResult::IterationLimit) return finish(LpStatus::IterationLimit);
    return finish(LpStatus::Optimal);
  }
};

SimplexSolver::SimplexSolver(const LpProblem& lp, SimplexOptions opts) : impl_(std::make_unique<Impl>()) {
  auto& s = *impl_;
  s.opts = opts;
  s.m = lp.num_rows();
  const int n = lp.num_variables();
  for (int j = 0; j < n; ++j)
    s.cols.push_back(Column{ColKind::Structural, lp.objective()[static_cast<std::size_t>(j)],
                            lp.lower()[static_cast<std::size_t>(j)], lp.upper()[static_cast<std::size_t>(j)], {}});
  int row = 0;
  for (const auto& c : lp.equalities()) {
    for (const auto& t : c.terms) s.cols[static_cast<std::size_t>(t.var)].entries.push_back(Term{row, t.coef});
    s.rhs.push_back(c.rhs);
    s.row_names.push_back(c.name);
    s.row_is_eq.push_back(true);
    ++row;
  }
  for (const auto& c : lp.inequalities()) {
    for (const auto& t : c.terms) s.cols[static_cast<std::size_t>(t.var)].entries.push_back(Term{row, t.coef});
    s.rhs.push_back(c.rhs);
    s.row_names.push_back(c.name);
    s.row_is_eq.push_back(false);
    ++row;
  }
  // Merge duplicate (row, var) terms.
  for (auto& c : s.cols) {
    std::sort(c.entries.begin(), c.entries.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto& t : c.entries) {
      if (!merged.empty() && merged.back().var == t.var)
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
    }
    c.entries.swap(merged);
  }
  for (int j = 0; j < n; ++j) s.user_cols.push_back(j);
  for (int i = 0; i < s.m; ++i)
    if (!s.row_is_eq[static_cast<std::size_t>(i)])
      s.cols.push_back(Column{ColKind::Slack, 0.0, 0.0, kInf, {Term{i, 1.0}}});
}

SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

int SimplexSolver::num_variables() const noexcept { return static_cast<int>(impl_->user_cols.size()); }

int SimplexSolver::add_column(double cost, const std::vector<Term>& entries, double lower, double upper) {
  auto& s = *impl_;
  if (!(lower <= upper)) throw InvalidArgument("column has empty bounds");
  Column c{ColKind::Structural, cost, lower, upper, {}};
  for (const auto& t : entries) {
    if (t.var < 0 || t.var >= s.m) throw InvalidArgument("column refers to unknown row");
    if (t.coef != 0.0) c.entries.push_back(t);
  }
  if (s.have_basis) s.reserve_columns(static_cast<std::size_t>(s.ncols()) + 1);
  s.cols.push_back(std::move(c));
  const int j = s.ncols() - 1;
  s.user_cols.push_back(j);
  if (s.have_basis) {
    VarState st{};
    s.value.push_back(Impl::start_value(s.cols.back(), st));
    s.state.push_back(st);
    s.write_tableau_column(j);
  }
  return static_cast<int>(s.user_cols.size()) - 1;
}

LpSolution SimplexSolver::solve() { return impl_->solve(); }

LpSolution solve_simplex(const LpProblem& lp, const SimplexOptions& opts) {
  SimplexSolver solver(lp, opts);
  return solver.solve();
}

}  // namespace nfr
