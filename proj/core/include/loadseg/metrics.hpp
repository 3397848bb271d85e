#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loadseg/runs.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

inline constexpr double kDefaultBeta = 1.5;

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Counts for one length category. The evaluation set is every normal sample
// plus the event samples of that category; uncertain samples and events of
// other categories are ignored. fp is therefore the same for all categories.
Confusion category_confusion(std::span<const Label> labels,
                             std::span<const std::uint8_t> predictions,
                             LengthCategory category);
Confusion category_confusion(const CategorizedLabels& labels,
                             std::span<const std::uint8_t> predictions,
                             LengthCategory category);

using ConfusionTable = std::array<Confusion, kNumCategories>;

ConfusionTable confusion_table(const CategorizedLabels& labels,
                               std::span<const std::uint8_t> predictions);
ConfusionTable& operator+=(ConfusionTable& a, const ConfusionTable& b);

// (1 + beta^2) P R / (beta^2 P + R), 0 when P + R = 0.
double f_beta(double precision, double recall, double beta = kDefaultBeta);

struct CategoryMetrics {
  LengthCategory category = LengthCategory::C1;
  Confusion counts;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  // False when the category has no event samples; such categories are left
  // out of the average.
  bool has_positives = false;
};

CategoryMetrics category_metrics(LengthCategory c, const Confusion& counts,
                                 double beta = kDefaultBeta);

struct DatasetMetrics {
  std::array<CategoryMetrics, kNumCategories> categories{};
  double average_f_beta = 0.0;
  double average_precision = 0.0;
  double average_recall = 0.0;
  // Categories that entered the averages.
  CategorySet averaged;
};

// Per-category metrics from pooled counts, averaged over the categories in
// `objective` that contain at least one event sample. Throws
// OptimizationError when none does.
DatasetMetrics metrics_from_table(const ConfusionTable& table,
                                  double beta = kDefaultBeta,
                                  CategorySet objective = CategorySet::all());

// Pools confusion counts over stations, then computes metrics.
DatasetMetrics dataset_metrics(std::span<const CategorizedLabels> labels,
                               std::span<const PredictionSeries> predictions,
                               double beta = kDefaultBeta,
                               CategorySet objective = CategorySet::all());

// ---------------------------------------------------------------------------
// Ranking quality

// Area under the ROC curve for each category's evaluation set, using the
// effective score (|z| for zero-centered scores) and the Mann-Whitney rank
// statistic with average ranks for ties. Absent where a category has no
// positives or no negatives.
using CategoryAuc = std::array<std::optional<double>, kNumCategories>;

CategoryAuc category_auc(const CategorizedLabels& labels,
                         std::span<const double> scores, Polarity polarity);
// Pooled over stations.
CategoryAuc category_auc(std::span<const CategorizedLabels> labels,
                         std::span<const ScoreSeries> scores);

// AUC of positive versus negative score samples via average ranks.
std::optional<double> rank_auc(std::span<const double> positives,
                               std::span<const double> negatives);

}  // namespace loadseg
