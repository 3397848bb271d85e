#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/metrics.hpp"
#include "loadseg/runs.hpp"

using namespace loadseg;
using namespace loadseg::test;

TEST(FBeta, MatchesClosedForm) {
  EXPECT_NEAR(f_beta(1.0, 0.5), 0.5909090909090909, 1e-12);
  EXPECT_NEAR(f_beta(1.0, 0.5), f_beta_oracle(1.0, 0.5, 1.5), 1e-15);
  EXPECT_EQ(f_beta(0.0, 0.0), 0.0);
  EXPECT_EQ(f_beta(0.0, 1.0), 0.0);
  EXPECT_NEAR(f_beta(0.3, 0.8, 1.0), 2 * 0.3 * 0.8 / 1.1, 1e-15);
}

TEST(FBeta, EqualPrecisionRecallIsFixedPoint) {
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const double x = rng.uniform(1e-6, 1.0);
    EXPECT_NEAR(f_beta(x, x), x, 1e-15);
  }
}

TEST(Confusion, ExclusionRuleHandCounts) {
  // Positions: 0..3 normal, 4 event(C1), 5 normal, 6..7 uncertain, 8..9 normal,
  // then a 30-sample event (C2).
  std::vector<Label> labels = labels_from({0, 0, 0, 0, 1, 0, 5, 5, 0, 0});
  labels.insert(labels.end(), 30, Label::Event);
  std::vector<std::uint8_t> pred(labels.size(), 0);
  pred[1] = 1;   // fp
  pred[4] = 1;   // tp C1
  pred[6] = 1;   // uncertain, ignored
  pred[9] = 1;   // fp
  for (int i = 10; i < 22; ++i) pred[i] = 1;  // 12 tp C2
  const auto cat = categorize(labels);

  const auto c1 = category_confusion(cat, pred, LengthCategory::C1);
  const auto c2 = category_confusion(cat, pred, LengthCategory::C2);
  EXPECT_EQ(c1, (Confusion{1, 2, 0}));
  EXPECT_EQ(c2, (Confusion{12, 2, 18}));
  EXPECT_EQ(c1.fp, c2.fp);
  EXPECT_EQ(category_confusion(cat, pred, LengthCategory::C3), (Confusion{0, 2, 0}));

  const auto raw = category_confusion(std::span<const Label>(labels), pred,
                                      LengthCategory::C2);
  EXPECT_EQ(raw, c2);
}

TEST(Metrics, AverageSkipsCategoriesWithoutPositives) {
  ConfusionTable t{};
  t[0] = {5, 5, 0};
  t[1] = {1, 5, 9};
  t[2] = {0, 5, 0};
  t[3] = {0, 5, 0};
  const auto m = metrics_from_table(t);
  EXPECT_TRUE(m.categories[0].has_positives);
  EXPECT_FALSE(m.categories[2].has_positives);
  EXPECT_EQ(m.averaged, (CategorySet{LengthCategory::C1, LengthCategory::C2}));
  const double f1 = f_beta_oracle(0.5, 1.0, 1.5);
  const double f2 = f_beta_oracle(1.0 / 6.0, 0.1, 1.5);
  EXPECT_NEAR(m.average_f_beta, (f1 + f2) / 2, 1e-15);

  const auto only_c2 = metrics_from_table(t, 1.5, {LengthCategory::C2});
  EXPECT_NEAR(only_c2.average_f_beta, f2, 1e-15);
  EXPECT_THROW(metrics_from_table(t, 1.5, {LengthCategory::C3}), OptimizationError);
}

TEST(Metrics, PooledCountsAcrossStations) {
  const auto a = categorize(labels_from({0, 1, 1, 0}));
  const auto b = categorize(labels_from({1, 0, 0, 0}));
  std::vector<CategorizedLabels> labels{a, b};
  std::vector<PredictionSeries> preds{{"a", {1, 1, 0, 0}}, {"b", {0, 0, 0, 1}}};
  const auto m = dataset_metrics(labels, preds);
  EXPECT_EQ(m.categories[0].counts, (Confusion{1, 2, 2}));
  EXPECT_DOUBLE_EQ(m.categories[0].precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.categories[0].recall, 1.0 / 3.0);
}

TEST(Auc, RankMatchesPairCounting) {
  Rng rng(5);
  for (int f = 0; f < 20; ++f) {
    const auto np = 1 + rng.index(60);
    const auto nn = 1 + rng.index(60);
    std::vector<double> pos(np), neg(nn);
    // Coarse values force ties.
    for (auto& x : pos) x = std::round(rng.uniform(0, 10)) / 2;
    for (auto& x : neg) x = std::round(rng.uniform(-2, 8)) / 2;
    EXPECT_NEAR(*rank_auc(pos, neg), auc_oracle(pos, neg), 1e-12);
  }
  EXPECT_FALSE(rank_auc({}, std::vector<double>{1.0}).has_value());
  EXPECT_DOUBLE_EQ(*rank_auc(std::vector<double>{1, 1}, std::vector<double>{1}), 0.5);
}

TEST(Auc, CategoryUsesAbsoluteScoreForZeroCentered) {
  const auto cat = categorize(labels_from({0, 0, 1, 0, 1}));
  std::vector<double> z{0.1, -0.2, -3.0, 0.3, 2.0};
  const auto auc = category_auc(cat, z, Polarity::ZeroCentered);
  ASSERT_TRUE(auc[0].has_value());
  EXPECT_DOUBLE_EQ(*auc[0], 1.0);
  EXPECT_FALSE(auc[1].has_value());
  const auto raw = category_auc(cat, z, Polarity::NonNegative);
  EXPECT_DOUBLE_EQ(*raw[0], 0.5);
}
