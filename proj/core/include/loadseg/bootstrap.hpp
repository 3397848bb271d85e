#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "loadseg/metrics.hpp"

namespace loadseg {

inline constexpr std::size_t kDefaultBootstrapIterations = 10000;

struct BootstrapSummary {
  std::string metric;
  double mean = 0.0;
  // Population standard deviation over iterations.
  double std = 0.0;
  // Iterations in which the metric was defined (not NaN).
  std::size_t iterations = 0;
};

// Resamples `n_stations` station indices with replacement `iterations` times
// and summarizes each entry of metric_fn's output. metric_fn may return NaN
// for a metric that is undefined on a resample; such values are skipped.
// Iteration k draws from a stream derived from (seed, k), so the result does
// not depend on `jobs`.
using BootstrapMetricFn =
    std::function<std::vector<double>(std::span<const std::size_t> sample)>;

std::vector<BootstrapSummary> bootstrap(
    std::size_t n_stations, const std::vector<std::string>& metric_names,
    const BootstrapMetricFn& metric_fn, std::size_t iterations,
    std::uint64_t seed, std::size_t jobs = 1);

// Precision, recall and F-beta per category plus the category averages,
// recomputed from pooled per-station confusion counts. Metric names are
// "<metric>/<category>" and "<metric>/average".
struct MetricsBootstrap {
  std::array<BootstrapSummary, kNumCategories> precision;
  std::array<BootstrapSummary, kNumCategories> recall;
  std::array<BootstrapSummary, kNumCategories> f_beta;
  BootstrapSummary average_precision;
  BootstrapSummary average_recall;
  BootstrapSummary average_f_beta;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

MetricsBootstrap bootstrap_metrics(std::span<const ConfusionTable> stations,
                                   std::size_t iterations, std::uint64_t seed,
                                   double beta = kDefaultBeta,
                                   std::size_t jobs = 1);

}  // namespace loadseg
