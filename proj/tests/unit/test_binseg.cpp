#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "loadseg/binseg.hpp"

using namespace loadseg;
using namespace loadseg::test;

namespace {

std::vector<double> piecewise(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.004) level = rng.uniform(-3, 3);
    z[i] = level + rng.normal(0, 0.5);
  }
  return z;
}

// Textbook recursion on segments, for comparison with the tree.
void recurse(std::span<const double> z, std::size_t s, std::size_t e,
             const BinsegParams& p, double pen, std::vector<std::size_t>& out) {
  auto c = best_split(z, s, e, p.min_size, p.jump);
  if (!c || !(c->gain > pen)) return;
  out.push_back(c->index);
  recurse(z, s, c->index, p, pen, out);
  recurse(z, c->index, e, p, pen, out);
}

}  // namespace

TEST(Binseg, L1CostMatchesDirect) {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto x = random_vector(rng, 1 + rng.index(200), -5, 5);
    EXPECT_NEAR(l1_cost(x), l1_oracle(x), 1e-9);
    const auto pre = prefix_l1_costs(x);
    ASSERT_EQ(pre.size(), x.size() + 1);
    EXPECT_EQ(pre[0], 0.0);
    for (std::size_t k = 1; k <= x.size(); k += 7)
      EXPECT_NEAR(pre[k], l1_oracle(std::span(x).first(k)), 1e-9);
  }
}

TEST(Binseg, FirstSplitMatchesExhaustive) {
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    const auto z = piecewise(rng, 200 + rng.index(1000));
    const auto got = best_split(z, 0, z.size(), 50, 5);
    const auto want = split_oracle(z, 0, z.size(), 50, 5);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->index, want->index);
      EXPECT_NEAR(got->gain, want->gain, 1e-7);
    }
  }
}

TEST(Binseg, SubrangeSplitMatchesExhaustive) {
  Rng rng(8);
  const auto z = piecewise(rng, 900);
  const auto got = best_split(z, 130, 770, 40, 10);
  const auto want = split_oracle(z, 130, 770, 40, 10);
  ASSERT_TRUE(got && want);
  EXPECT_EQ(got->index, want->index);
}

TEST(Binseg, NoAdmissibleSplit) {
  std::vector<double> z(99, 1.0);
  EXPECT_FALSE(best_split(z, 0, z.size(), 50, 5).has_value());
}

TEST(Binseg, DetectsStep) {
  std::vector<double> z(600, 0.0);
  for (std::size_t i = 300; i < 600; ++i) z[i] = 5.0;
  BinsegParams p{0.01, 50, 10, PenaltyScaling::Linear};
  EXPECT_EQ(binseg_breakpoints(z, p), (std::vector<std::size_t>{300, 600}));
}

TEST(Binseg, BreakpointsProperties) {
  Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    const auto z = piecewise(rng, 3000);
    BinsegParams p{0.05, 100, 5, PenaltyScaling::Linear};
    const auto bp = binseg_breakpoints(z, p);
    ASSERT_FALSE(bp.empty());
    EXPECT_EQ(bp.back(), z.size());
    std::size_t prev = 0;
    for (auto b : bp) {
      EXPECT_GE(b - prev, p.min_size);
      if (b != z.size()) EXPECT_EQ(b % p.jump, 0u);
      prev = b;
    }
  }
}

TEST(Binseg, TreeEqualsDirectRecursionForEveryPenalty) {
  Rng rng(31);
  const auto z = piecewise(rng, 4000);
  const double min_pen = 0.005 * z.size();
  const auto tree = binseg_tree(z, 150, 5, min_pen);
  for (double beta : {0.005, 0.008, 0.015, 0.05, 0.08, 0.12, 1.0}) {
    BinsegParams p{beta, 150, 5, PenaltyScaling::Linear};
    const double pen = split_penalty(z, p);
    std::vector<std::size_t> want;
    recurse(z, 0, z.size(), p, pen, want);
    want.push_back(z.size());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(breakpoints_from_tree(tree, pen), want) << beta;
    EXPECT_EQ(binseg_breakpoints(z, p), want) << beta;
  }
}

TEST(Binseg, PenaltyScaling) {
  std::vector<double> z{0, 1, 2, 3, 100};
  BinsegParams lin{0.5, 2, 1, PenaltyScaling::Linear};
  EXPECT_DOUBLE_EQ(split_penalty(z, lin), 2.5);
  BinsegParams l1{0.5, 2, 1, PenaltyScaling::L1};
  EXPECT_GT(split_penalty(z, l1), 0.0);
}

TEST(Binseg, ReferenceValues) {
  std::vector<double> z{1, 1, 1, 10, 10, 10, 10, 3};
  std::vector<std::size_t> bp{3, 7, 8};
  EXPECT_DOUBLE_EQ(find_reference_value(z, bp, ReferencePoint::Mean), 46.0 / 8);
  EXPECT_DOUBLE_EQ(find_reference_value(z, bp, ReferencePoint::Median), 6.5);
  EXPECT_DOUBLE_EQ(find_reference_value(z, bp, ReferencePoint::LongestMean), 10);
  EXPECT_DOUBLE_EQ(find_reference_value(z, bp, ReferencePoint::LongestMedian), 10);
  std::vector<double> tie{1, 1, 5, 5};
  std::vector<std::size_t> tbp{2, 4};
  EXPECT_DOUBLE_EQ(find_reference_value(tie, tbp, ReferencePoint::LongestMean), 1);
}
