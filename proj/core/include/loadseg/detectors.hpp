#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loadseg/isolation_forest.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

struct RobustScaleParams {
  double median = 0.0;
  // Interquantile distance, or the fallback standard deviation.
  double distance = 1.0;
  // True when the interquantile distance was zero.
  bool fallback_stddev = false;
  // True when both the distance and the standard deviation were zero; all
  // scaled values are then zero.
  bool constant = false;
};

struct ScaledSeries {
  std::vector<double> values;
  RobustScaleParams params;
};

// z_i = (x_i - median) / (quantile(q_upper) - quantile(q_lower)). A zero
// distance falls back to the standard deviation; a constant series maps to
// all zeros with a warning. Throws DataError on empty input.
ScaledSeries robust_scale(std::span<const double> x, double q_lower,
                          double q_upper);

// Statistical process control: robust-scaled residual, zero centered.
ScoreSeries spc_score(const DifferenceSeries& series, const SpcConfig& cfg);

// Isolation forest fit on the station's own residual. Scores are the anomaly
// score a(x) in (0, 1].
ScoreSeries if_score_per_station(const DifferenceSeries& series,
                                 const IfConfig& cfg, std::uint64_t seed);

struct PooledForest {
  IsolationForest forest;
  double q_lower = 15.0;
  double q_upper = 85.0;
};

// Fits one forest on the robust-scaled residuals of all stations,
// concatenated in ascending station id order.
PooledForest fit_pooled_forest(std::span<const DifferenceSeries> all,
                               const IfConfig& cfg, std::uint64_t seed);

// Scores one station with an already fitted pooled forest.
ScoreSeries score_with_pooled_forest(const PooledForest& model,
                                     const DifferenceSeries& series);

// Fit-then-score over the given stations; output order matches input order.
std::vector<ScoreSeries> if_score_pooled(std::span<const DifferenceSeries> all,
                                         const IfConfig& cfg,
                                         std::uint64_t seed);

struct BinsegResult {
  ScoreSeries scores;
  std::vector<std::size_t> breakpoints;
  double reference_value = 0.0;
  RobustScaleParams scale;
  double penalty = 0.0;
};

// mean(segment) - reference for every sample of each segment.
std::vector<double> segment_scores(std::span<const double> z,
                                   std::span<const std::size_t> breakpoints,
                                   double reference);

// Robust-scales the residual, segments it and scores every sample with
// mean(segment) - reference.
BinsegResult binseg_score(const DifferenceSeries& series,
                          const BinsegConfig& cfg);

}  // namespace loadseg
