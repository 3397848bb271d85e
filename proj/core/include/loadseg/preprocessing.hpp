#pragma once

#include <span>

#include "loadseg/types.hpp"

namespace loadseg {

struct PreprocessConfig {
  // Maximum allowed run of identical S values around a sample.
  std::size_t max_repeats = 5;
  // Only samples with S strictly inside these percentiles enter the fit.
  double q_lower = 10.0;
  double q_upper = 90.0;

  void validate() const;
};

// Linear map from bottom-up load onto the measurement: s ~ slope * b + offset.
struct FitResult {
  double slope = 1.0;
  double offset = 0.0;
  bool degenerate = false;
};

struct PreprocessResult {
  DifferenceSeries series;
  FitResult fit;
  bool sign_corrected = false;
  std::size_t removed_count = 0;
};

// True iff the bottom-up value is missing (NaN).
bool bottom_up_missing(double b);

// True iff the block of values equal to s[i] that contains position i, clipped
// to the window [i - r, i + r], is at least r samples long. `i` is 0-based.
bool repeated_measurements(std::span<const double> s, std::size_t i,
                           std::size_t r);

// Removes missing and repeated samples, fits the bottom-up load onto S using
// the quantile band, corrects the sign of unsigned stations and returns the
// difference series. Throws DataError when every sample is removed or fewer
// than two samples fall inside the quantile band.
PreprocessResult preprocess(const StationSeries& station,
                            const PreprocessConfig& cfg = {});

}  // namespace loadseg
