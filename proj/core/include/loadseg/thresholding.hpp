#pragma once

#include <array>
#include <span>
#include <vector>

#include "loadseg/metrics.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

// Flags |z| >= theta for zero-centered scores and z >= theta otherwise.
// Throws ConfigError unless theta >= 0.
PredictionSeries threshold_one_sided(const ScoreSeries& scores, double theta);

// Flags z >= upper or z < lower. Zero-centered scores only; requires
// lower < upper.
PredictionSeries threshold_two_sided(const ScoreSeries& scores, double lower,
                                     double upper);

PredictionSeries apply_thresholds(const ScoreSeries& scores,
                                  const ThresholdSet& thresholds);

// Metrics of a threshold set applied to every station.
DatasetMetrics evaluate_thresholds(std::span<const ScoreSeries> scores,
                                   std::span<const CategorizedLabels> labels,
                                   const ThresholdSet& thresholds,
                                   double beta = kDefaultBeta,
                                   CategorySet objective = CategorySet::all());

struct OptimizeOptions {
  ThresholdStrategy strategy = ThresholdStrategy::Symmetrical;
  CategorySet objective = CategorySet::all();
  double beta = kDefaultBeta;
  // Per-side candidate cap of the two-sided search.
  std::size_t max_side_candidates = 1000;
  std::size_t jobs = 1;
};

struct ThresholdOptimizationResult {
  ThresholdSet threshold_set;
  // Average F-beta over the objective categories with positives.
  double achieved = 0.0;
  // Metrics at the returned thresholds, for all four categories.
  DatasetMetrics metrics;
  // Thresholds (one-sided) or threshold pairs (two-sided) evaluated.
  std::size_t candidate_count = 0;
  CategorySet objective;
  // True when a side of the two-sided search was thinned to the cap.
  bool capped = false;
};

// Exhaustive search over the pooled score values of all stations.
//
// One-sided: every distinct effective score and +inf; ties go to the largest
// theta. Two-sided: lower bounds from -inf, the distinct negative scores and
// 0; upper bounds from the distinct non-negative scores and +inf; each side
// thinned to evenly spaced quantiles when above the cap. Ties go to the pair
// with the fewest flagged samples, then the larger upper bound.
//
// Throws OptimizationError when no objective category has positives and
// ConfigError for a two-sided search on non-negative scores.
ThresholdOptimizationResult optimize_thresholds(
    std::span<const ScoreSeries> scores,
    std::span<const CategorizedLabels> labels, const OptimizeOptions& options);

}  // namespace loadseg
