#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/ensembles.hpp"
#include "loadseg/metrics.hpp"

using namespace loadseg;
using namespace loadseg::test;

namespace {

struct Stations {
  std::vector<DifferenceSeries> series;
  std::vector<CategorizedLabels> labels;
};

// Short spikes plus one long offset per station.
Stations fleet(std::size_t n, std::uint64_t seed) {
  Stations s;
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Label> l(3000, Label::Normal);
    const std::size_t long_start = 800 + rng.index(600);
    for (std::size_t i = long_start; i < long_start + 700; ++i) l[i] = Label::Event;
    for (int e = 0; e < 6; ++e) {
      const std::size_t at = 100 + 400 * e + rng.index(50);
      if (at >= long_start - 30 && at < long_start + 730) continue;
      for (std::size_t i = at; i < at + 1 + rng.index(10); ++i) l[i] = Label::Event;
    }
    std::vector<double> d(l.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = rng.normal(0, 1);
      if (l[i] == Label::Event)
        d[i] += (i >= long_start && i < long_start + 700) ? 3.0 : 9.0;
    }
    auto ds = make_series("st" + std::to_string(k), d, l);
    s.labels.push_back(categorize(ds));
    s.series.push_back(std::move(ds));
  }
  return s;
}

EnsembleConfig config(EnsembleStrategy st) {
  EnsembleConfig c;
  c.strategy = st;
  c.long_detector.beta = 0.05;
  c.long_detector.min_size = 100;
  c.long_detector.jump = 10;
  c.short_detector = SpcConfig{10, 90, ThresholdStrategy::Symmetrical};
  return c;
}

double recall(const CategorizedLabels& l, const PredictionSeries& p, LengthCategory c) {
  const auto k = category_confusion(l, p.predictions, c);
  return k.tp + k.fn ? static_cast<double>(k.tp) / (k.tp + k.fn) : 0.0;
}

}  // namespace

TEST(Naive, ElementwiseOr) {
  const auto r = ensemble_naive({"a", {0, 1, 0, 1}}, {"a", {0, 0, 1, 1}});
  EXPECT_EQ(r.predictions, (std::vector<std::uint8_t>{0, 1, 1, 1}));
  EXPECT_THROW(ensemble_naive({"a", {0}}, {"a", {0, 1}}), DataError);
}

TEST(Naive, RecallDominatesComponents) {
  const auto s = fleet(4, 1);
  const auto m = train_ensemble(config(EnsembleStrategy::Naive), s.series, s.labels, 5);
  for (std::size_t k = 0; k < s.series.size(); ++k) {
    const auto out = apply_method(m, s.series[k]);
    for (auto c : kAllCategories) {
      const double r = recall(s.labels[k], out.predictions, c);
      EXPECT_GE(r, recall(s.labels[k], out.primary_predictions, c));
      EXPECT_GE(r, recall(s.labels[k], *out.secondary_predictions, c));
    }
  }
}

TEST(Doc, DetectorsOptimizeOwnCategories) {
  const auto s = fleet(4, 2);
  const auto run = ensemble_doc(s.series, s.labels, config(EnsembleStrategy::Doc), 5);
  EXPECT_EQ(run.model.primary.objective, CategorySet::long_events());
  ASSERT_TRUE(run.model.secondary.has_value());
  EXPECT_EQ(run.model.secondary->objective, CategorySet::short_events());
  ASSERT_EQ(run.outputs.size(), 4u);
  for (const auto& o : run.outputs)
    EXPECT_EQ(o.predictions.predictions,
              ensemble_naive(o.primary_predictions, *o.secondary_predictions).predictions);
}

TEST(Sequential, SecondStageSeesOnlyResidual) {
  const auto s = fleet(4, 3);
  const auto run =
      ensemble_sequential(s.series, s.labels, config(EnsembleStrategy::Sequential), 5);
  for (std::size_t k = 0; k < s.series.size(); ++k) {
    const auto& o = run.outputs[k];
    std::size_t residual = 0;
    for (std::size_t i = 0; i < s.series[k].size(); ++i) {
      const bool stage1 = o.primary_predictions.predictions[i];
      if (stage1) {
        EXPECT_TRUE(std::isnan(o.secondary_scores->scores[i]));
        EXPECT_EQ(o.secondary_predictions->predictions[i], 0);
      } else {
        ++residual;
      }
      EXPECT_EQ(o.predictions.predictions[i],
                stage1 || o.secondary_predictions->predictions[i]);
    }
    EXPECT_EQ(o.residual_indices.size(), residual);
  }
}

TEST(Sequential, ResidualSeries) {
  auto d = make_series("a", {1, 2, 3, 4}, labels_from({0, 1, 1, 0}));
  std::vector<std::size_t> idx;
  const auto r = residual_series(d, {"a", {0, 1, 0, 0}}, idx);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(r.delta, (std::vector<double>{1, 3, 4}));
  EXPECT_EQ(r.timestamps[1], d.timestamps[2]);
}

TEST(Sequential, SilentSecondStageWithoutResidual) {
  ResidualSet empty;
  const auto m = train_second_stage(SpcConfig{}, empty, CategorySet::short_events(), 1);
  EXPECT_EQ(std::get<SymmetricThreshold>(m.thresholds).theta,
            std::numeric_limits<double>::infinity());
}

TEST(Ensemble, ConfigValidation) {
  auto c = config(EnsembleStrategy::Doc);
  c.short_categories = {LengthCategory::C1, LengthCategory::C3};
  EXPECT_THROW(c.validate(), ConfigError);
  c.short_categories = {LengthCategory::C1};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(ensemble_strategy_from_string("sequential"), EnsembleStrategy::Sequential);
  EXPECT_THROW(ensemble_strategy_from_string("stacked"), ConfigError);
}

TEST(Ensemble, TrainingIsDeterministic) {
  const auto s = fleet(3, 4);
  auto c = config(EnsembleStrategy::Sequential);
  c.short_detector = IfConfig{50, false};
  const auto a = train_ensemble(c, s.series, s.labels, 9);
  const auto b = train_ensemble(c, s.series, s.labels, 9);
  EXPECT_EQ(a.primary.thresholds, b.primary.thresholds);
  EXPECT_EQ(a.secondary->thresholds, b.secondary->thresholds);
  EXPECT_EQ(apply_method(a, s.series[0]).predictions.predictions,
            apply_method(b, s.series[0]).predictions.predictions);
}

TEST(Single, TrainAndApply) {
  const auto s = fleet(3, 5);
  const auto m = train_single(SpcConfig{}, s.series, s.labels, 0);
  EXPECT_FALSE(m.ensemble.has_value());
  EXPECT_GT(m.primary.achieved, 0.0);
  std::vector<PredictionSeries> preds;
  for (const auto& d : s.series) preds.push_back(apply_method(m, d).predictions);
  EXPECT_EQ(dataset_metrics(s.labels, preds).average_f_beta, m.primary.achieved);
}
