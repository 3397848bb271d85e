#include <benchmark/benchmark.h>

#include "loadseg/binseg.hpp"
#include "loadseg/isolation_forest.hpp"
#include "loadseg/random.hpp"

using namespace loadseg;

namespace {

std::vector<double> piecewise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> z(n);
  double level = 0.0;
  for (auto& v : z) {
    if (rng.uniform() < 0.001) level = rng.uniform(-3, 3);
    v = level + rng.normal(0, 0.5);
  }
  return z;
}

}  // namespace

// One year of 15-minute samples.
static void BM_BinsegBreakpoints(benchmark::State& state) {
  const auto z = piecewise(static_cast<std::size_t>(state.range(0)), 1);
  const BinsegParams p{0.008, 200, 10, PenaltyScaling::Linear};
  for (auto _ : state) benchmark::DoNotOptimize(binseg_breakpoints(z, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinsegBreakpoints)->Arg(8760)->Arg(35040)->Unit(benchmark::kMillisecond);

static void BM_BinsegTree(benchmark::State& state) {
  const auto z = piecewise(35040, 2);
  for (auto _ : state) benchmark::DoNotOptimize(binseg_tree(z, 200, 10, 0.002 * z.size()));
}
BENCHMARK(BM_BinsegTree)->Unit(benchmark::kMillisecond);

static void BM_IsolationForestFit(benchmark::State& state) {
  const auto z = piecewise(35040, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        IsolationForest::fit(z, static_cast<int>(state.range(0)), 256, 7));
}
BENCHMARK(BM_IsolationForestFit)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_IsolationForestScore(benchmark::State& state) {
  const auto z = piecewise(35040, 4);
  const auto forest = IsolationForest::fit(z, 1000, 256, 7);
  for (auto _ : state) benchmark::DoNotOptimize(forest.anomaly_scores(z));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(z.size()));
}
BENCHMARK(BM_IsolationForestScore)->Unit(benchmark::kMillisecond);
