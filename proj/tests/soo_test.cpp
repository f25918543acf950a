#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracle.hpp"
#include "vdec/soo.hpp"

namespace vdec {
namespace {

Dataset d1() {
  return Dataset(NumericVector{1, 2, 3, 4},
                 {CharacterColumn("A", {"a", "a", "b", "b"}),
                  CharacterColumn("B", {"u", "v", "u", "v"})});
}

TEST(SooRank, D1PicksLargerFirstComponent) {
  // both orders by brute force: (A,B) starts with 1.0, (B,A) with 0.25
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<std::vector<std::string>> codes{{"a", "a", "b", "b"}, {"u", "v", "u", "v"}};
  ASSERT_GT(oracle::decompose(x, codes, {0, 1}).components[0],
            oracle::decompose(x, codes, {1, 0}).components[0]);

  const auto r = soo_rank(d1());
  EXPECT_EQ(r.order, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(r.columns, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(r.result.steps[0].component, 1.0);
  EXPECT_DOUBLE_EQ(r.result.steps[1].component, 0.25);
  EXPECT_FALSE(r.degenerate);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].candidates.size(), 2u);
  EXPECT_EQ(r.trace[1].candidates.size(), 1u);
}

TEST(SooRank, IdenticalColumnsTieToColumnOrder) {
  const std::vector<std::string> codes{"p", "q", "p", "q", "q"};
  const Dataset d(NumericVector{1, 5, 2, 6, 4},
                  {CharacterColumn("X", codes), CharacterColumn("Y", codes),
                   CharacterColumn("Z", codes)});
  const auto r = soo_rank(d);
  EXPECT_EQ(r.order, (std::vector<std::string>{"X", "Y", "Z"}));
  EXPECT_GT(r.result.steps[0].component, 0.0);
  EXPECT_EQ(r.result.steps[1].component, 0.0);
  EXPECT_EQ(r.result.steps[2].component, 0.0);
}

TEST(SooRank, ZeroVarianceIsFlaggedAndDeterministic) {
  const Dataset d(NumericVector{2, 2, 2},
                  {CharacterColumn("A", {"a", "b", "a"}), CharacterColumn("B", {"x", "x", "y"})});
  const auto r = soo_rank(d);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.order, (std::vector<std::string>{"A", "B"}));
  EXPECT_THROW((void)residual_curve(r), DegenerateError);
}

TEST(SooRank, Preconditions) {
  EXPECT_THROW((void)soo_rank(Dataset(NumericVector{1, 2}, {})), InvalidArgument);
  EXPECT_THROW((void)soo_rank(d1(), 3), InvalidArgument);
  EXPECT_TRUE(soo_rank(d1(), 0).order.empty());
}

TEST(ResidualCurve, Examples) {
  const auto c = residual_curve(soo_rank(d1()));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_DOUBLE_EQ(c[0], 0.2);  // 0.25 / 1.25
  EXPECT_DOUBLE_EQ(c[1], 0.0);

  const Dataset full(NumericVector{1, 2, 3}, {CharacterColumn("ID", {"i", "j", "k"})});
  EXPECT_EQ(residual_curve(soo_rank(full)), (std::vector<double>{0.0}));
}

TEST(RobustnessCheck, D1IsStable) {
  const auto r = robustness_check(d1());
  EXPECT_EQ(r.full_order, (std::vector<std::string>{"A", "B"}));
  ASSERT_EQ(r.omissions.size(), 2u);
  EXPECT_EQ(r.omissions[0].omitted, "A");
  EXPECT_EQ(r.omissions[0].order, (std::vector<std::string>{"B"}));
  EXPECT_EQ(r.omissions[1].order, (std::vector<std::string>{"A"}));
  EXPECT_TRUE(r.stable);
}

TEST(RobustnessCheck, ShapeWithDominantNoiseAndDuplicate) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, 0.1);
  const std::size_t n = 200;
  std::vector<std::string> dom(n), junk(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = coin(rng);
    dom[i] = a ? "1" : "0";
    junk[i] = coin(rng) ? "1" : "0";
    x[i] = (a ? 3.0 : 0.0) + noise(rng);
  }
  const Dataset d(NumericVector(x), {CharacterColumn("dominant", dom), CharacterColumn("noise", junk),
                                     CharacterColumn("copy", dom)});
  const auto r = robustness_check(d);
  ASSERT_EQ(r.omissions.size(), 3u);
  for (const auto& o : r.omissions) EXPECT_EQ(o.order.size(), 2u);
  EXPECT_EQ(r.full_order.front(), "dominant");
}

TEST(RobustnessCheck, DetectsInstability) {
  const std::vector<double> x{2, 1, 3, 4, 2, 2, 1, 3};
  const std::vector<std::vector<std::string>> codes{{"1", "0", "1", "1", "0", "0", "1", "1"},
                                                    {"0", "0", "1", "0", "1", "0", "1", "1"},
                                                    {"1", "0", "0", "0", "0", "0", "0", "0"}};
  // Alone, C explains more than B; after A has been used, B adds more than C.
  ASSERT_GT(oracle::decompose(x, codes, {2}).components[0],
            oracle::decompose(x, codes, {1}).components[0]);
  ASSERT_GT(oracle::decompose(x, codes, {0, 1}).components[1],
            oracle::decompose(x, codes, {0, 2}).components[1]);

  const Dataset d(NumericVector(x), {CharacterColumn("A", codes[0]), CharacterColumn("B", codes[1]),
                                     CharacterColumn("C", codes[2])});
  const auto r = robustness_check(d);
  EXPECT_EQ(r.full_order, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(r.omissions[0].order, (std::vector<std::string>{"C", "B"}));
  EXPECT_EQ(r.omissions[1].order, (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(r.omissions[2].order, (std::vector<std::string>{"A", "B"}));
  EXPECT_FALSE(r.stable);

  EXPECT_THROW((void)robustness_check(Dataset(NumericVector{1, 2}, {CharacterColumn("A", {"a", "b"})})),
               InvalidArgument);
}

class SooProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{77};
};

TEST_F(SooProperties, GreedyDominanceAndObjectiveEquivalence) {
  for (int t = 0; t < 200; ++t) {
    const auto d = testing::to_dataset(testing::random_raw(rng, 100, 6, 5));
    const auto r = soo_rank(d);
    const double tol = 1e-9 * std::max(r.result.total_variance, 1.0);
    for (const auto& step : r.trace) {
      const auto& chosen = step.candidates[step.chosen];
      double max_inc = -1.0, min_res = 1e300;
      for (const auto& c : step.candidates) {
        EXPECT_GE(chosen.increment, c.increment - kTieTolerance * c.increment);
        max_inc = std::max(max_inc, c.increment);
        min_res = std::min(min_res, c.residual_after);
      }
      std::set<std::size_t> by_inc, by_res;
      for (const auto& c : step.candidates) {
        if (c.increment >= max_inc - tol) by_inc.insert(c.column);
        if (c.residual_after <= min_res + tol) by_res.insert(c.column);
      }
      EXPECT_EQ(by_inc, by_res);
      EXPECT_TRUE(by_res.count(chosen.column));
    }
  }
}

TEST_F(SooProperties, PrefixConsistencyAndDeterminism) {
  for (int t = 0; t < 100; ++t) {
    const auto d = testing::to_dataset(testing::random_raw(rng, 80, 6, 4));
    const auto full = soo_rank(d);
    EXPECT_EQ(full, soo_rank(d));
    for (std::size_t m = 0; m <= d.num_characters(); ++m) {
      const auto part = soo_rank(d, m);
      ASSERT_EQ(part.order.size(), m);
      EXPECT_TRUE(std::equal(part.order.begin(), part.order.end(), full.order.begin()));
      EXPECT_TRUE(std::equal(part.trace.begin(), part.trace.end(), full.trace.begin()));
    }
  }
}

TEST_F(SooProperties, GreedyStepsMatchOracleDecomposition) {
  for (int t = 0; t < 100; ++t) {
    const auto raw = testing::random_raw(rng, 12, 3, 3);
    const auto r = soo_rank(testing::to_dataset(raw));
    const auto expected = oracle::decompose(raw.x, raw.codes, r.columns);
    for (std::size_t k = 0; k < r.columns.size(); ++k) {
      EXPECT_NEAR(r.result.steps[k].component, expected.components[k],
                  1e-12 * std::max(1.0, expected.total_variance));
    }
  }
}

}  // namespace
}  // namespace vdec
