#include "nfr/lp_build.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfr/error.hpp"

namespace nfr {
namespace {

std::string idx(const std::string& base, int a) { return base + "_" + std::to_string(a); }
std::string idx(const std::string& base, int a, int b) { return idx(idx(base, a), b); }

void require_lp_scenario(const Scenario& s) {
  if (!(s.alpha() > 0.0)) throw InvalidArgument("the LP formulations need alpha in (0,1)");
}

std::string flow_name(const NfrLayout& layout, int n, int i, int j) {
  return layout.is_positional() ? idx("f" + std::to_string(n), i, j) : idx("f", i, j);
}

void add_variables(LpProblem& lp, const NfrLayout& layout, const Scenario& s) {
  const int k = s.size();
  for (int i = 0; i < k; ++i) lp.add_variable(idx("z", i), s.cost()(i));
  for (int n = 0; n < layout.positions(); ++n)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) lp.add_variable(flow_name(layout, n, i, j), 0.0);
}

}  // namespace

LpProblem build_op_uni(const Scenario& s) {
  require_lp_scenario(s);
  const int k = s.size();
  const double n_slots = s.slots();
  const auto layout = NfrLayout::uniform(k);
  const Vector qmax = q_max(s.similarity(), s.slots());
  const auto& u = s.similarity();

  LpProblem lp;
  add_variables(lp, layout, s);

  for (int i = 0; i < k; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < k; ++j)
      if (j != i) t.push_back({layout.f(0, i, j), 1.0});
    t.push_back({layout.z(i), -n_slots});
    lp.add_equality(idx("budget", i), std::move(t), 0.0);
  }
  const double w = s.alpha() / n_slots;
  for (int j = 0; j < k; ++j) {
    std::vector<Term> t{{layout.z(j), 1.0}};
    for (int i = 0; i < k; ++i)
      if (i != j) t.push_back({layout.f(0, i, j), -w});
    lp.add_equality(idx("stationarity", j), std::move(t), s.popularity()(j));
  }
  for (int i = 0; i < k; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < k; ++j)
      if (j != i && u(i, j) != 0.0) t.push_back({layout.f(0, i, j), u(i, j)});
    t.push_back({layout.z(i), -s.quality() * qmax(i)});
    lp.add_greater_equal(idx("quality", i), std::move(t), 0.0);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j)
        lp.add_less_equal(idx("cap", i, j), {{layout.f(0, i, j), 1.0}, {layout.z(i), -1.0}}, 0.0);
  return lp;
}

LpProblem build_op_pref(const Scenario& s) {
  require_lp_scenario(s);
  const int k = s.size();
  const int slots = s.slots();
  const auto& v = s.clicks();
  const auto layout = NfrLayout::positional(k, slots);
  const Vector qmax = q_max_positional(s.similarity(), slots, v);
  const auto& u = s.similarity();

  LpProblem lp;
  add_variables(lp, layout, s);

  for (int n = 0; n < slots; ++n)
    for (int i = 0; i < k; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < k; ++j)
        if (j != i) t.push_back({layout.f(n, i, j), 1.0});
      t.push_back({layout.z(i), -1.0});
      lp.add_equality(idx("budget", n, i), std::move(t), 0.0);
    }
  for (int j = 0; j < k; ++j) {
    std::vector<Term> t{{layout.z(j), 1.0}};
    for (int n = 0; n < slots; ++n)
      for (int i = 0; i < k; ++i)
        if (i != j && v(n) != 0.0) t.push_back({layout.f(n, i, j), -s.alpha() * v(n)});
    lp.add_equality(idx("stationarity", j), std::move(t), s.popularity()(j));
  }
  for (int i = 0; i < k; ++i) {
    std::vector<Term> t;
    for (int n = 0; n < slots; ++n)
      for (int j = 0; j < k; ++j)
        if (j != i && u(i, j) != 0.0 && v(n) != 0.0) t.push_back({layout.f(n, i, j), v(n) * u(i, j)});
    t.push_back({layout.z(i), -s.quality() * qmax(i)});
    lp.add_greater_equal(idx("quality", i), std::move(t), 0.0);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<Term> t;
      for (int n = 0; n < slots; ++n) t.push_back({layout.f(n, i, j), 1.0});
      t.push_back({layout.z(i), -1.0});
      lp.add_less_equal(idx("overlap", i, j), std::move(t), 0.0);
    }
  return lp;
}

std::vector<LpProblem> build_greedy(const Scenario& s) {
  const int k = s.size();
  const Vector qmax = q_max(s.similarity(), s.slots());
  const auto& u = s.similarity();
  std::vector<LpProblem> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    LpProblem lp;
    std::vector<Term> budget;
    std::vector<Term> quality;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const int v = lp.add_variable(idx("r", i, j), s.cost()(j), 0.0, 1.0);
      budget.push_back({v, 1.0});
      if (u(i, j) != 0.0) quality.push_back({v, u(i, j)});
    }
    lp.add_equality(idx("budget", i), std::move(budget), s.slots());
    lp.add_greater_equal(idx("quality", i), std::move(quality), s.quality() * qmax(i));
    out.push_back(std::move(lp));
  }
  return out;
}

Policy assemble_greedy(const std::vector<LpSolution>& rows, const Scenario& s) {
  const int k = s.size();
  if (static_cast<int>(rows.size()) != k) throw InvalidArgument("need one greedy solution per row");
  Matrix r = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    const auto& sol = rows[static_cast<std::size_t>(i)];
    if (sol.status != LpStatus::Optimal)
      throw SolverError("greedy row " + std::to_string(i) + " is " + to_string(sol.status));
    int col = 0;
    for (int j = 0; j < k; ++j)
      if (j != i) r(i, j) = std::clamp(sol.x.at(static_cast<std::size_t>(col++)), 0.0, 1.0);
  }
  return Policy::uniform(std::move(r));
}

double policy_residual(const Policy& policy, const Scenario& s) {
  double worst = 0.0;
  for (const auto& v : validate_policy(policy, s, 0.0)) {
    double amount = std::abs(v.magnitude);
    if (v.kind == Violation::Kind::Bound) amount = v.magnitude < 0.0 ? -v.magnitude : v.magnitude - 1.0;
    worst = std::max(worst, amount);
  }
  const Vector achieved = quality_of(policy, s);
  const Vector ceiling = quality_ceiling(s, policy.is_positional());
  for (int i = 0; i < s.size(); ++i) worst = std::max(worst, s.quality() * ceiling(i) - achieved(i));
  return worst;
}

RecoveredPolicy recover_policy(const LpSolution& sol, const Scenario& s, bool positional) {
  if (sol.status != LpStatus::Optimal)
    throw SolverError(std::string("cannot recover a policy from a ") + to_string(sol.status) + " solution");
  const int k = s.size();
  const auto layout = positional ? NfrLayout::positional(k, s.slots()) : NfrLayout::uniform(k);
  if (static_cast<int>(sol.x.size()) != layout.num_variables())
    throw InvalidArgument("solution does not match the problem layout");

  Vector z(k);
  for (int i = 0; i < k; ++i) {
    z(i) = sol.x[static_cast<std::size_t>(layout.z(i))];
    if (!(z(i) > kMinVisitRate))
      throw SolverError("visit rate z_" + std::to_string(i) +
                        " is not positive; p0 must be strictly positive");
  }
  std::vector<Matrix> mats(static_cast<std::size_t>(layout.positions()), Matrix::Zero(k, k));
  for (int n = 0; n < layout.positions(); ++n)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j)
          mats[static_cast<std::size_t>(n)](i, j) =
              std::clamp(sol.x[static_cast<std::size_t>(layout.f(n, i, j))] / z(i), 0.0, 1.0);

  Policy policy = positional ? Policy::positional(std::move(mats)) : Policy::uniform(std::move(mats.front()));
  const double obj = z.dot(s.cost());
  const double residual = policy_residual(policy, s);
  return RecoveredPolicy{std::move(policy), std::move(z), obj, (1.0 - s.alpha()) * obj, residual};
}

}  // namespace nfr
