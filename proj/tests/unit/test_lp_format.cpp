#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nfr/error.hpp"
#include "nfr/lp_build.hpp"
#include "nfr/lp_format.hpp"
#include "nfr/simplex.hpp"
#include "oracles.hpp"

namespace {

using nfr::LpProblem;
using nfr::kInf;

void expect_same_problem(const LpProblem& a, const LpProblem& b) {
  ASSERT_EQ(a.num_variables(), b.num_variables());
  ASSERT_EQ(a.num_rows(), b.num_rows());
  EXPECT_EQ(a.names(), b.names());
  EXPECT_EQ(a.objective(), b.objective());
  EXPECT_EQ(a.lower(), b.lower());
  EXPECT_EQ(a.upper(), b.upper());
  auto same_rows = [](const std::vector<nfr::Constraint>& x, const std::vector<nfr::Constraint>& y) {
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x[i].name, y[i].name);
      EXPECT_EQ(x[i].rhs, y[i].rhs);
      ASSERT_EQ(x[i].terms.size(), y[i].terms.size()) << x[i].name;
      for (std::size_t t = 0; t < x[i].terms.size(); ++t) {
        EXPECT_EQ(x[i].terms[t].var, y[i].terms[t].var);
        EXPECT_EQ(x[i].terms[t].coef, y[i].terms[t].coef);
      }
    }
  };
  same_rows(a.equalities(), b.equalities());
  same_rows(a.inequalities(), b.inequalities());
}

LpProblem round_trip(const LpProblem& lp) {
  std::stringstream ss;
  nfr::write_lp(ss, lp);
  return nfr::read_lp(ss);
}

TEST(LpProblem, RejectsDuplicateNamesAndBadIndices) {
  LpProblem lp;
  lp.add_variable("x", 1.0);
  EXPECT_THROW(lp.add_variable("x", 2.0), nfr::InvalidArgument);
  EXPECT_THROW(lp.add_equality("r", {{3, 1.0}}, 0.0), nfr::InvalidArgument);
  EXPECT_EQ(lp.find("x"), 0);
  EXPECT_FALSE(lp.find("y").has_value());
}

TEST(LpProblem, ViolationMeasuresRowsAndBounds) {
  LpProblem lp;
  lp.add_variable("x", 1.0, 0.0, 1.0);
  lp.add_variable("y", 1.0);
  lp.add_equality("e", {{0, 1.0}, {1, 1.0}}, 2.0);
  lp.add_greater_equal("g", {{1, 1.0}}, 1.5);
  EXPECT_DOUBLE_EQ(lp.max_violation({0.5, 1.5}), 0.0);
  EXPECT_DOUBLE_EQ(lp.max_violation({1.25, 0.75}), 0.75);
  EXPECT_DOUBLE_EQ(lp.evaluate({0.5, 1.5}), 2.0);
}

TEST(LpFormat, RoundTripsRandomProblemsExactly) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto lp = oracle::random_lp(gen, 3 + trial % 6, 3, 1);
    lp.add_variable("free_" + std::to_string(trial), 0.125, -kInf, kInf);
    lp.add_variable("fixed", 1.0 / 3.0, 0.7, 0.7);
    expect_same_problem(lp, round_trip(lp));
  }
}

TEST(LpFormat, RoundTripsRecommendationLps) {
  const auto s = oracle::random_scenario(4, {.items = 5, .slots = 2, .alpha = 0.8, .quality = 0.7, .positional = true});
  expect_same_problem(nfr::build_op_uni(s), round_trip(nfr::build_op_uni(s)));
  expect_same_problem(nfr::build_op_pref(s), round_trip(nfr::build_op_pref(s)));
}

TEST(LpFormat, ReadsHandWrittenFile) {
  std::istringstream in(R"(\ comment
Minimize
 obj: 2 x + 3 y
   - z
Subject To
 c1: x + y >= 1
 c2: x - z <= 4
 c3: y + z = 2
Bounds
 x <= 5
 -1 <= z <= 3
End
)");
  const auto lp = nfr::read_lp(in);
  ASSERT_EQ(lp.num_variables(), 3);
  EXPECT_EQ(lp.names(), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(lp.objective(), (std::vector<double>{2, 3, -1}));
  EXPECT_EQ(lp.upper()[0], 5.0);
  EXPECT_EQ(lp.lower()[2], -1.0);
  EXPECT_EQ(lp.equalities().size(), 1u);
  EXPECT_EQ(lp.inequalities().size(), 2u);
  const auto sol = nfr::solve_simplex(lp);
  ASSERT_EQ(sol.status, nfr::LpStatus::Optimal);
  // y = 2 - z caps z at 2, then x >= z - 1: optimum x = 1, y = 0, z = 2.
  EXPECT_NEAR(sol.objective, 0.0, 1e-12);
  EXPECT_NEAR(sol.x[2], 2.0, 1e-12);
  EXPECT_NEAR(sol.objective, lp.evaluate(sol.x), 1e-12);
}

TEST(LpFormat, MalformedInputNamesTheLine) {
  std::istringstream in("Minimize\n obj: 2 x +\nSubject To\n c1: x >= \nEnd\n");
  try {
    nfr::read_lp(in);
    FAIL() << "expected a parse error";
  } catch (const nfr::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
}

TEST(SolutionFile, ParsesAssignmentsAndStatus) {
  std::istringstream in("# result\nstatus=Optimal\nobjective=3\nx = 1.5\ny 2\n\n");
  const auto f = nfr::read_solution(in);
  EXPECT_EQ(f.status, "optimal");
  EXPECT_EQ(f.values.at("x"), 1.5);
  EXPECT_EQ(f.values.at("y"), 2.0);
  EXPECT_EQ(f.values.count("objective"), 0u);
  std::istringstream bad("x=abc\n");
  EXPECT_THROW(nfr::read_solution(bad), nfr::IoError);
}

TEST(SolutionFile, WriteThenReadIsExact) {
  std::mt19937_64 gen(12);
  const auto lp = oracle::random_lp(gen, 6, 3, 1);
  const auto sol = nfr::solve_simplex(lp);
  ASSERT_EQ(sol.status, nfr::LpStatus::Optimal);
  std::stringstream ss;
  nfr::write_solution(ss, lp, sol);
  const auto f = nfr::read_solution(ss);
  for (int j = 0; j < lp.num_variables(); ++j) EXPECT_EQ(f.values.at(lp.names()[static_cast<std::size_t>(j)]), sol.x[static_cast<std::size_t>(j)]);
}

}  // namespace
