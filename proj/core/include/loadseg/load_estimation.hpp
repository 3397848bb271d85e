#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loadseg/types.hpp"

namespace loadseg {

enum class EstimateSource : std::uint8_t {
  GroundTruthFiltered,
  PredictionFiltered,
  Unfiltered
};

std::string_view to_string(EstimateSource s);

// Extremes of the signed measurement over samples kept as normal. The
// minimum is only reported for stations with at least one negative signed
// measurement.
struct LoadEstimate {
  std::string station_id;
  double max_load = 0.0;
  std::optional<double> min_load;
  EstimateSource source = EstimateSource::Unfiltered;
};

// Keeps samples with prediction 0. Throws DataError ("fully filtered") when
// nothing is kept.
LoadEstimate load_estimate(const DifferenceSeries& series,
                           const PredictionSeries& mask);
// Keeps samples labelled normal.
LoadEstimate load_estimate_ground_truth(const DifferenceSeries& series);
LoadEstimate load_estimate_unfiltered(const DifferenceSeries& series);

struct BoundError {
  std::string station_id;
  bool is_max = true;
  double truth = 0.0;
  double predicted = 0.0;
  // (predicted - truth) / |truth|; absent when truth is 0.
  std::optional<double> relative_error;
  bool exact = false;
  bool within_margin = false;
};

struct BoundSummary {
  // Stations entering the fractions.
  std::size_t stations = 0;
  // Stations left out because the true value is 0.
  std::size_t undefined = 0;
  double fraction_exact = 0.0;
  double fraction_within_margin = 0.0;
};

struct EstimateErrorTable {
  std::vector<BoundError> rows;
  BoundSummary max;
  BoundSummary min;
  double margin = 0.1;
};

inline constexpr double kExactRelativeTolerance = 1e-9;

// Pairs estimates by station id. Throws DataError when the station sets
// differ or a station reports a minimum on one side only.
EstimateErrorTable estimate_errors(std::span<const LoadEstimate> truth,
                                   std::span<const LoadEstimate> predicted,
                                   double margin = 0.1);

}  // namespace loadseg
