#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "nfr/error.hpp"
#include "nfr/model.hpp"
#include "oracles.hpp"

namespace {

using nfr::Matrix;
using nfr::Policy;
using nfr::Scenario;
using nfr::Vector;

Matrix example_similarity() {
  // Row 0 is the five-item example catalog: items 1 and 2 are fully
  // related, item 3 weakly, item 4 not at all.
  Matrix u = Matrix::Zero(5, 5);
  u.row(0) << 0, 1.0, 1.0, 0.2, 0.0;
  for (int i = 1; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) u(i, j) = 0.1 * ((i + j) % 4);
  return u;
}

Scenario scenario_for(const Matrix& u, int slots, Vector clicks = {}, double q = 0.0) {
  const auto k = u.rows();
  Vector c = Vector::Ones(k);
  Vector p0 = Vector::Constant(k, 1.0 / static_cast<double>(k));
  return Scenario({u, c, p0, 0.5, slots, std::move(clicks), q});
}

// Sum of the N largest entries of row i, excluding the diagonal.
double top_n_sum(const Matrix& u, int i, int n) {
  std::vector<double> v;
  for (int j = 0; j < u.cols(); ++j)
    if (j != i) v.push_back(u(i, j));
  std::sort(v.rbegin(), v.rend());
  double s = 0.0;
  for (int t = 0; t < n; ++t) s += v[static_cast<std::size_t>(t)];
  return s;
}

TEST(Scenario, ForcesZeroDiagonal) {
  Matrix u = Matrix::Constant(3, 3, 0.5);
  const Scenario s({u, Vector::Ones(3), Vector::Constant(3, 1.0 / 3), 0.5, 1, {}, 0.0});
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s.similarity()(i, i), 0.0);
  EXPECT_EQ(s.similarity()(0, 1), 0.5);
}

TEST(Scenario, DefaultsToUniformClicks) {
  const Scenario s = scenario_for(example_similarity(), 2);
  ASSERT_EQ(s.clicks().size(), 2);
  EXPECT_DOUBLE_EQ(s.clicks()(0), 0.5);
  EXPECT_TRUE(s.uniform_clicks());
  EXPECT_TRUE(s.binary_costs());
}

TEST(Scenario, RejectsInvalidParameters) {
  const Matrix u = example_similarity();
  const Vector c = Vector::Ones(5);
  const Vector p0 = Vector::Constant(5, 0.2);
  auto make = [&](auto mutate) {
    Scenario::Params p{u, c, p0, 0.5, 2, {}, 0.5};
    mutate(p);
    return Scenario(std::move(p));
  };
  EXPECT_THROW(make([](auto& p) { p.popularity(0) = 0.0; p.popularity(1) = 0.4; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.popularity(0) = 0.3; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.similarity(0, 1) = 1.5; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.similarity(0, 1) = -0.1; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.cost(2) = -1.0; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.alpha = 1.0; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.alpha = -0.1; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.slots = 5; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.slots = 0; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.quality = 1.1; }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.clicks = Vector::Constant(2, 0.6); }), nfr::InvalidArgument);
  EXPECT_THROW(make([](auto& p) { p.clicks = Vector::Constant(3, 1.0 / 3); }), nfr::InvalidArgument);
  EXPECT_NO_THROW(make([](auto& p) { p.alpha = 0.0; }));
}

TEST(Scenario, WithModifiersRevalidate) {
  const Scenario s = scenario_for(example_similarity(), 2);
  EXPECT_DOUBLE_EQ(s.with_quality(0.9).quality(), 0.9);
  EXPECT_DOUBLE_EQ(s.with_alpha(0.8).alpha(), 0.8);
  EXPECT_EQ(s.with_slots(3).clicks().size(), 3);
  EXPECT_THROW(s.with_quality(2.0), nfr::InvalidArgument);
  Vector v(2);
  v << 0.8, 0.2;
  EXPECT_FALSE(s.with_clicks(v).uniform_clicks());
}

TEST(ValidatePolicy, ForcedTwoByTwoPolicyIsValid) {
  Matrix u(2, 2);
  u << 0, 1, 1, 0;
  const Scenario s = scenario_for(u, 1);
  Matrix r(2, 2);
  r << 0, 1, 1, 0;
  EXPECT_TRUE(nfr::validate_policy(Policy::uniform(r), s).empty());
}

TEST(ValidatePolicy, ExampleRowWithSplitSecondSlotIsValid) {
  // Item 1 always shown, items 2 and 3 share the second slot.
  const Scenario s = scenario_for(example_similarity(), 2);
  Matrix r = nfr::baseline_policy(s.similarity(), 2).matrix();
  r.row(0) << 0, 1, 0.5, 0.5, 0;
  const auto v = nfr::validate_policy(Policy::uniform(r), s);
  EXPECT_TRUE(std::none_of(v.begin(), v.end(), [](const auto& x) { return x.row == 0; }));
  EXPECT_TRUE(v.empty());
}

TEST(ValidatePolicy, ReportsDiagonalEntry) {
  const Scenario s = scenario_for(example_similarity(), 2);
  Matrix r = nfr::baseline_policy(s.similarity(), 2).matrix();
  r(1, 1) = 0.1;
  const auto v = nfr::validate_policy(Policy::uniform(r), s);
  ASSERT_FALSE(v.empty());
  const auto diag = std::find_if(v.begin(), v.end(), [](const auto& x) { return x.kind == nfr::Violation::Kind::Diagonal; });
  ASSERT_NE(diag, v.end());
  EXPECT_EQ(diag->row, 1);
  EXPECT_EQ(diag->col, 1);
  EXPECT_DOUBLE_EQ(diag->magnitude, 0.1);
  EXPECT_NE(diag->message.find("diagonal nonzero"), std::string::npos);
}

TEST(ValidatePolicy, ReportsBoundsBudgetsAndOverlap) {
  const Scenario s = scenario_for(example_similarity(), 2);
  Matrix r = nfr::baseline_policy(s.similarity(), 2).matrix();
  r(2, 0) = 1.5;
  r(3, 0) = -0.2;
  auto v = nfr::validate_policy(Policy::uniform(r), s);
  auto count = [&](nfr::Violation::Kind k) { return std::count_if(v.begin(), v.end(), [&](const auto& x) { return x.kind == k; }); };
  EXPECT_EQ(count(nfr::Violation::Kind::Bound), 2);
  EXPECT_GE(count(nfr::Violation::Kind::RowSum), 2);

  Vector clicks(2);
  clicks << 0.7, 0.3;
  const Scenario sp = scenario_for(example_similarity(), 2, clicks);
  Matrix a = Matrix::Zero(5, 5), b = Matrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    a(i, (i + 1) % 5) = 1.0;
    b(i, (i + 1) % 5) = 1.0;  // same item in both slots
  }
  v = nfr::validate_policy(Policy::positional({a, b}), sp);
  EXPECT_EQ(count(nfr::Violation::Kind::SlotOverlap), 5);
}

TEST(ValidatePolicy, DimensionMismatchThrows) {
  const Scenario s = scenario_for(example_similarity(), 2);
  EXPECT_THROW(nfr::validate_policy(Policy::uniform(Matrix::Zero(3, 3)), s), nfr::InvalidArgument);
  EXPECT_THROW(nfr::validate_policy(Policy::positional({Matrix::Zero(5, 5)}), s), nfr::InvalidArgument);
}

TEST(QMax, ExampleRow) {
  EXPECT_DOUBLE_EQ(nfr::q_max(example_similarity(), 2)(0), 2.0);
}

TEST(QMax, ZeroSimilarityGivesZero) {
  EXPECT_TRUE(nfr::q_max(Matrix::Zero(4, 4), 2).isZero());
}

TEST(QMax, SortAndSum) {
  Matrix u = Matrix::Zero(4, 4);
  u.row(0) << 0, 0.5, 0.3, 0.2;
  EXPECT_DOUBLE_EQ(nfr::q_max(u, 2)(0), 0.8);
}

TEST(QMax, RejectsTooManySlots) {
  EXPECT_THROW(nfr::q_max(example_similarity(), 5), nfr::InvalidArgument);
}

TEST(QMaxPositional, SortedPairing) {
  Vector v(2);
  v << 0.8, 0.2;
  EXPECT_DOUBLE_EQ(nfr::q_max_positional(example_similarity(), 2, v)(0), 1.0);
  Matrix u = Matrix::Zero(4, 4);
  u.row(0) << 0, 1, 0, 0;
  Vector w(2);
  w << 0.3, 0.7;  // unsorted input
  EXPECT_DOUBLE_EQ(nfr::q_max_positional(u, 2, w)(0), 0.7);
}

TEST(QMaxPositional, UniformClicksDivideByN) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = oracle::random_scenario(gen(), {.items = 8, .slots = 3});
    const Vector a = nfr::q_max_positional(s.similarity(), 3, Vector::Constant(3, 1.0 / 3));
    const Vector b = nfr::q_max(s.similarity(), 3) / 3.0;
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Baseline, ExampleRowPicksTopTwo) {
  const Policy p = nfr::baseline_policy(example_similarity(), 2);
  Eigen::RowVectorXd expected(5);
  expected << 0, 1, 1, 0, 0;
  EXPECT_EQ(p.matrix().row(0), expected);
}

TEST(Baseline, TiesGoToLowestIndex) {
  const Matrix u = Matrix::Constant(4, 4, 0.5);
  const Policy p = nfr::baseline_policy(u, 1);
  EXPECT_EQ(p.matrix()(0, 1), 1.0);
  EXPECT_EQ(p.matrix()(1, 0), 1.0);
  EXPECT_EQ(p.matrix()(3, 0), 1.0);
}

TEST(Baseline, TopTwoSelection) {
  Matrix u = Matrix::Zero(4, 4);
  u.row(0) << 0, 0.2, 0.9, 0.5;
  Eigen::RowVectorXd expected(4);
  expected << 0, 0, 1, 1;
  EXPECT_EQ(nfr::baseline_policy(u, 2).matrix().row(0), expected);
}

TEST(Baseline, PositionalPutsBestItemInMostClickedSlot) {
  Vector v(2);
  v << 0.3, 0.7;
  const Policy p = nfr::baseline_policy(example_similarity(), 2, v);
  ASSERT_TRUE(p.is_positional());
  EXPECT_EQ(p.position(1)(0, 1), 1.0);
  EXPECT_EQ(p.position(0)(0, 2), 1.0);
}

TEST(Baseline, PropertiesOnRandomInstances) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 3 + static_cast<int>(gen() % 8);
    const int n = 1 + static_cast<int>(gen() % static_cast<unsigned>(k - 1));
    const bool positional = trial % 2 == 1;
    const auto s = oracle::random_scenario(gen(), {.items = k, .slots = n, .positional = positional});
    const Vector clicks = positional ? s.clicks() : Vector();
    const Policy base = nfr::baseline_policy(s.similarity(), n, clicks);
    EXPECT_TRUE(nfr::validate_policy(base, s, 0.0).empty());
    const Vector achieved = nfr::quality_of(base, s);
    const Vector ceiling = nfr::quality_ceiling(s, positional);
    for (int i = 0; i < k; ++i) EXPECT_EQ(achieved(i), ceiling(i)) << "row " << i;
    if (!positional) {
      for (int i = 0; i < k; ++i) EXPECT_NEAR(ceiling(i), top_n_sum(s.similarity(), i, n), 1e-12);
    }
  }
}

TEST(QMax, MonotoneInN) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = oracle::random_scenario(gen(), {.items = 9});
    for (int n = 1; n + 1 < 9; ++n)
      EXPECT_TRUE(((nfr::q_max(s.similarity(), n + 1) - nfr::q_max(s.similarity(), n)).array() >= 0.0).all());
  }
}

TEST(QualityOf, ExampleRowAtEightyPercent) {
  const Scenario s = scenario_for(example_similarity(), 2);
  Matrix r = nfr::baseline_policy(s.similarity(), 2).matrix();
  r.row(0) << 0, 0.8, 0.8, 0, 0.4;
  EXPECT_NEAR(nfr::quality_of(Policy::uniform(r), s)(0), 1.6, 1e-15);
}

TEST(QualityOf, ZeroRowGivesZero) {
  const Scenario s = scenario_for(example_similarity(), 2);
  EXPECT_TRUE(nfr::quality_of(Policy::uniform(Matrix::Zero(5, 5)), s).isZero());
}

TEST(QualityOf, PositionalWeightsByClicks) {
  Vector v(2);
  v << 0.8, 0.2;
  const Scenario s = scenario_for(example_similarity(), 2, v);
  Matrix a = Matrix::Zero(5, 5), b = Matrix::Zero(5, 5);
  a(0, 3) = 1.0;  // u = 0.2 in the likely slot
  b(0, 1) = 1.0;  // u = 1.0 in the unlikely slot
  EXPECT_NEAR(nfr::quality_of(Policy::positional({a, b}), s)(0), 0.8 * 0.2 + 0.2 * 1.0, 1e-15);
}

TEST(SpreadOverPositions, KeepsTransitionsAndValidity) {
  std::mt19937_64 gen(31);
  Vector v(3);
  v << 0.6, 0.3, 0.1;
  const auto s = oracle::random_scenario(7, {.items = 7, .slots = 3, .positional = true});
  const Policy u = oracle::random_uniform_policy(gen, 7, 3);
  const Policy p = nfr::spread_over_positions(u, 3);
  EXPECT_TRUE(nfr::validate_policy(p, s, 1e-12).empty());
  Matrix q = Matrix::Zero(7, 7);
  for (int n = 0; n < 3; ++n) q += s.clicks()(n) * p.position(n);
  EXPECT_LE((q - u.matrix() / 3.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Entropy, Examples) {
  Vector half(2), point(2), skew(2);
  half << 0.5, 0.5;
  point << 1.0, 0.0;
  skew << 0.8, 0.2;
  EXPECT_NEAR(nfr::entropy(half), 1.0, 1e-15);
  EXPECT_EQ(nfr::entropy(point), 0.0);
  EXPECT_NEAR(nfr::entropy(skew), 0.72193, 5e-6);
  EXPECT_NEAR(nfr::entropy(skew), -(0.8 * std::log2(0.8) + 0.2 * std::log2(0.2)), 1e-15);
  EXPECT_EQ(nfr::entropy(Vector::Ones(1)), 0.0);
  EXPECT_THROW(nfr::entropy(Vector::Constant(2, 0.4)), nfr::InvalidArgument);
}

TEST(Entropy, PermutationInvariantAndMaximalAtUniform) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = unit(gen);
    v /= v.sum();
    Vector w = v.reverse();
    EXPECT_NEAR(nfr::entropy(v), nfr::entropy(w), 1e-14);
    EXPECT_LT(nfr::entropy(v), 1.0);
    EXPECT_GE(nfr::entropy(v), 0.0);
  }
}

TEST(ZipfClicks, NormalizedAndDecreasing) {
  const Vector v = nfr::zipf_clicks(4, 1.0);
  EXPECT_NEAR(v.sum(), 1.0, 1e-15);
  for (int n = 0; n + 1 < 4; ++n) EXPECT_GT(v(n), v(n + 1));
  EXPECT_NEAR(v(0) / v(1), 2.0, 1e-14);
  EXPECT_TRUE(nfr::zipf_clicks(3, 0.0).isApprox(Vector::Constant(3, 1.0 / 3)));
}

}  // namespace
