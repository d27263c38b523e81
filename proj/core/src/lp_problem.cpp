#include "nfr/lp_problem.hpp"

#include <algorithm>
#include <cmath>

#include "nfr/error.hpp"

namespace nfr {

int LpProblem::add_variable(std::string name, double cost, double lower, double upper) {
  if (!(lower <= upper)) throw InvalidArgument("variable " + name + " has empty bounds");
  const int idx = num_variables();
  if (!index_.emplace(name, idx).second)
    throw InvalidArgument("duplicate variable name " + name);
  names_.push_back(std::move(name));
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return idx;
}

void LpProblem::check_terms(const std::vector<Term>& terms) const {
  for (const auto& t : terms)
    if (t.var < 0 || t.var >= num_variables())
      throw InvalidArgument("constraint refers to unknown variable");
}

void LpProblem::add_equality(std::string name, std::vector<Term> terms, double rhs) {
  check_terms(terms);
  equalities_.push_back(Constraint{std::move(name), std::move(terms), rhs});
}

void LpProblem::add_less_equal(std::string name, std::vector<Term> terms, double rhs) {
  check_terms(terms);
  inequalities_.push_back(Constraint{std::move(name), std::move(terms), rhs});
}

void LpProblem::add_greater_equal(std::string name, std::vector<Term> terms, double rhs) {
  for (auto& t : terms) t.coef = -t.coef;
  add_less_equal(std::move(name), std::move(terms), -rhs);
}

std::optional<int> LpProblem::find(const std::string& name) const {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  return std::nullopt;
}

double LpProblem::evaluate(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) v += cost_[j] * x.at(j);
  return v;
}

double LpProblem::max_violation(const std::vector<double>& x) const {
  if (x.size() != names_.size()) throw InvalidArgument("solution has the wrong length");
  double worst = 0.0;
  auto row_value = [&](const Constraint& c) {
    double s = 0.0;
    for (const auto& t : c.terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
    return s;
  };
  for (const auto& c : equalities_) worst = std::max(worst, std::abs(row_value(c) - c.rhs));
  for (const auto& c : inequalities_) worst = std::max(worst, row_value(c) - c.rhs);
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lower_[j] - x[j]);
    worst = std::max(worst, x[j] - upper_[j]);
  }
  return worst;
}

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

}  // namespace nfr
