#include <benchmark/benchmark.h>

#include "loadseg/random.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/thresholding.hpp"

using namespace loadseg;

namespace {

struct Data {
  std::vector<ScoreSeries> scores;
  std::vector<CategorizedLabels> labels;
};

// Stations with events of every length category and scores that separate
// them only partly.
Data stations(std::size_t count, std::size_t n) {
  Rng rng(11);
  Data d;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<Label> l(n, Label::Normal);
    for (std::size_t len : {5, 60, 600, 5000}) {
      const auto start = rng.index(n - len);
      std::fill_n(l.begin() + static_cast<std::ptrdiff_t>(start), len, Label::Event);
    }
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
      z[i] = rng.normal(l[i] == Label::Event ? 1.5 : 0.0, 1.0);
    d.scores.push_back({"s" + std::to_string(s), std::move(z), Polarity::ZeroCentered});
    d.labels.push_back(categorize(l));
  }
  return d;
}

}  // namespace

static void BM_OptimizeThresholds(benchmark::State& state) {
  const auto d = stations(10, 35040);
  OptimizeOptions o;
  o.strategy = state.range(0) ? ThresholdStrategy::Asymmetrical : ThresholdStrategy::Symmetrical;
  o.max_side_candidates = 200;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_thresholds(d.scores, d.labels, o));
}
BENCHMARK(BM_OptimizeThresholds)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
