#pragma once

#include <span>
#include <vector>

namespace loadseg {

// Percentile `pct` in [0, 100] of already sorted data, linearly interpolated
// between order statistics (the "type 7" rule). Requires non-empty input.
double quantile_sorted(std::span<const double> sorted, double pct);

// Same as quantile_sorted but sorts a copy first.
double quantile(std::span<const double> values, double pct);
double median(std::span<const double> values);
double mean(std::span<const double> values);
// Population (ddof 0) standard deviation.
double stddev(std::span<const double> values);

std::vector<double> sorted_copy(std::span<const double> values);

// Streaming mean / population variance (Welford). Identical inputs yield a
// variance of exactly zero.
class RunningStats {
 public:
  void push(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  double stddev() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace loadseg
