#pragma once

// Linear programs in the form
//   minimize c^T x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  l <= x <= u
// with sparse constraint rows and named variables.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace nfr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  double rhs = 0.0;
};

class LpProblem {
 public:
  /// Adds a variable and returns its index. Names must be unique.
  int add_variable(std::string name, double cost, double lower = 0.0, double upper = kInf);

  void add_equality(std::string name, std::vector<Term> terms, double rhs);
  void add_less_equal(std::string name, std::vector<Term> terms, double rhs);
  /// Stored as the negated <= row.
  void add_greater_equal(std::string name, std::vector<Term> terms, double rhs);

  int num_variables() const noexcept { return static_cast<int>(names_.size()); }
  int num_rows() const noexcept {
    return static_cast<int>(equalities_.size() + inequalities_.size());
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& objective() const noexcept { return cost_; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<Constraint>& equalities() const noexcept { return equalities_; }
  const std::vector<Constraint>& inequalities() const noexcept { return inequalities_; }

  std::optional<int> find(const std::string& name) const;

  /// Objective value of `x`.
  double evaluate(const std::vector<double>& x) const;
  /// Largest violation of any row or bound at `x`.
  double max_violation(const std::vector<double>& x) const;

  void set_objective(int var, double cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }

 private:
  void check_terms(const std::vector<Term>& terms) const;

  std::vector<std::string> names_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Constraint> equalities_;
  std::vector<Constraint> inequalities_;
  std::unordered_map<std::string, int> index_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status) noexcept;

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  std::int64_t iterations = 0;
  double max_residual = 0.0;
  /// Row duals, equalities first then inequalities (d_j = c_j - y^T A_j).
  /// Empty when the backend does not provide them.
  std::vector<double> duals;
  /// For infeasible problems: the row carrying the largest phase-one residual.
  std::string tightest_row;
};

}  // namespace nfr
