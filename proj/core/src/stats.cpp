#include "loadseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loadseg/errors.hpp"

namespace loadseg {

double quantile_sorted(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw DataError("quantile of empty sequence");
  const double h = static_cast<double>(sorted.size() - 1) * (pct / 100.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

double quantile(std::span<const double> values, double pct) {
  const auto v = sorted_copy(values);
  return quantile_sorted(v, pct);
}

double median(std::span<const double> values) { return quantile(values, 50.0); }

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of empty sequence");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  const double m = mean(values);
  double acc = 0.0;
  for (double x : values) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

void RunningStats::push(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

}  // namespace loadseg
