#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "loadseg/detectors.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/log.hpp"
#include "loadseg/stats.hpp"

using namespace loadseg;
using namespace loadseg::test;

TEST(RobustScale, Formula) {
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  const auto s = robust_scale(x, 10, 90);
  EXPECT_DOUBLE_EQ(s.params.median, 6);
  EXPECT_DOUBLE_EQ(s.params.distance, 8);
  EXPECT_DOUBLE_EQ(s.values[0], -5.0 / 8);
  EXPECT_FALSE(s.params.fallback_stddev);
}

TEST(RobustScale, FallbacksAndErrors) {
  std::vector<double> mostly{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 10};
  const auto s = robust_scale(mostly, 10, 90);
  EXPECT_TRUE(s.params.fallback_stddev);
  EXPECT_DOUBLE_EQ(s.params.distance, stddev(mostly));

  std::vector<std::string> warnings;
  set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
  const auto c = robust_scale(std::vector<double>(5, 3.0), 10, 90);
  set_warning_sink({});
  EXPECT_TRUE(c.params.constant);
  for (double v : c.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(warnings.size(), 1u);

  EXPECT_THROW(robust_scale({}, 10, 90), DataError);
}

TEST(Spc, ZeroCenteredScaledResidual) {
  auto d = make_series("a", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11},
                       std::vector<Label>(11, Label::Normal));
  const auto z = spc_score(d, {10, 90});
  EXPECT_EQ(z.polarity, Polarity::ZeroCentered);
  EXPECT_DOUBLE_EQ(z.scores[10], 5.0 / 8);
  EXPECT_THROW(spc_score(d, {90, 10}), ConfigError);
}

TEST(IfDetector, PerStationAndPooled) {
  const auto l = labels_with_events({10}, 300);
  const auto a = noisy_series("a", l, 20.0, 1.0, 1);
  const auto b = noisy_series("b", l, 20.0, 1.0, 2);
  IfConfig cfg;
  cfg.n_estimators = 100;
  const auto s = if_score_per_station(a, cfg, 3);
  EXPECT_EQ(s.polarity, Polarity::NonNegative);
  EXPECT_GT(s.scores[305], s.scores[5]);

  cfg.pooled = true;
  std::vector<DifferenceSeries> all{b, a};
  const auto pooled = if_score_pooled(all, cfg, 3);
  ASSERT_EQ(pooled.size(), 2u);
  EXPECT_EQ(pooled[0].station_id, "b");
  const auto model = fit_pooled_forest(all, cfg, 3);
  EXPECT_EQ(score_with_pooled_forest(model, a).scores, pooled[1].scores);
  // Fit order follows station ids, not input order.
  std::vector<DifferenceSeries> swapped{a, b};
  EXPECT_EQ(fit_pooled_forest(swapped, cfg, 3).forest.breaks(), model.forest.breaks());
}

TEST(BinsegDetector, SegmentScores) {
  std::vector<double> z{0, 0, 2, 2, 2, 5};
  std::vector<std::size_t> bp{2, 5, 6};
  const auto s = segment_scores(z, bp, 1.0);
  EXPECT_EQ(s, (std::vector<double>{-1, -1, 1, 1, 1, 4}));
}

TEST(BinsegDetector, LongEventGetsOffsetScore) {
  const auto l = labels_with_events({600}, 1500);
  const auto d = noisy_series("a", l, 8.0, 1.0, 4);
  BinsegConfig cfg;
  // A block in the middle only pays off after the second split; the first
  // split at its start gains little under L1 cost.
  cfg.beta = 0.002;
  cfg.min_size = 100;
  const auto r = binseg_score(d, cfg);
  EXPECT_EQ(r.breakpoints.back(), d.size());
  EXPECT_GE(r.breakpoints.size(), 3u);
  EXPECT_GT(r.scores.scores[1800], 0.5);
  EXPECT_LT(std::abs(r.scores.scores[200]), 0.3);
  EXPECT_DOUBLE_EQ(r.penalty, 0.002 * d.size());
}
