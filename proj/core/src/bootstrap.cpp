#include "loadseg/bootstrap.hpp"

#include <cmath>
#include <limits>

#include "loadseg/errors.hpp"
#include "loadseg/parallel.hpp"
#include "loadseg/random.hpp"
#include "loadseg/stats.hpp"

namespace loadseg {

std::vector<BootstrapSummary> bootstrap(
    std::size_t n_stations, const std::vector<std::string>& metric_names,
    const BootstrapMetricFn& metric_fn, std::size_t iterations,
    std::uint64_t seed, std::size_t jobs) {
  if (n_stations == 0) throw DataError("bootstrap: no stations");
  const std::size_t m = metric_names.size();
  std::vector<double> values(iterations * m);
  parallel_for(iterations, jobs, [&](std::size_t it) {
    Rng rng(mix_seed(seed, it));
    std::vector<std::size_t> sample(n_stations);
    for (auto& s : sample) s = rng.index(n_stations);
    const auto v = metric_fn(sample);
    if (v.size() != m) throw Error("bootstrap: metric count mismatch");
    std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(it * m));
  });

  std::vector<BootstrapSummary> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    RunningStats rs;
    for (std::size_t it = 0; it < iterations; ++it) {
      const double v = values[it * m + k];
      if (!std::isnan(v)) rs.push(v);
    }
    out[k] = {metric_names[k], rs.mean(), rs.stddev(), rs.count()};
  }
  return out;
}

MetricsBootstrap bootstrap_metrics(std::span<const ConfusionTable> stations,
                                   std::size_t iterations, std::uint64_t seed,
                                   double beta, std::size_t jobs) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> names;
  for (const char* metric : {"precision", "recall", "f_beta"})
    for (auto c : kAllCategories)
      names.push_back(std::string(metric) + "/" + std::string(to_string(c)));
  names.insert(names.end(),
               {"precision/average", "recall/average", "f_beta/average"});

  auto fn = [&](std::span<const std::size_t> sample) {
    ConfusionTable total{};
    for (auto k : sample) total += stations[k];
    std::vector<double> v(names.size(), kNaN);
    double sf = 0, sp = 0, sr = 0;
    std::size_t n = 0;
    for (auto c : kAllCategories) {
      const auto m = category_metrics(c, total[index_of(c)], beta);
      if (!m.has_positives) continue;
      const auto ci = index_of(c);
      v[ci] = m.precision;
      v[kNumCategories + ci] = m.recall;
      v[2 * kNumCategories + ci] = m.f_beta;
      sp += m.precision;
      sr += m.recall;
      sf += m.f_beta;
      ++n;
    }
    if (n > 0) {
      v[3 * kNumCategories] = sp / static_cast<double>(n);
      v[3 * kNumCategories + 1] = sr / static_cast<double>(n);
      v[3 * kNumCategories + 2] = sf / static_cast<double>(n);
    }
    return v;
  };

  const auto s = bootstrap(stations.size(), names, fn, iterations, seed, jobs);
  MetricsBootstrap out;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    out.precision[c] = s[c];
    out.recall[c] = s[kNumCategories + c];
    out.f_beta[c] = s[2 * kNumCategories + c];
  }
  out.average_precision = s[3 * kNumCategories];
  out.average_recall = s[3 * kNumCategories + 1];
  out.average_f_beta = s[3 * kNumCategories + 2];
  out.iterations = iterations;
  out.seed = seed;
  return out;
}

}  // namespace loadseg
