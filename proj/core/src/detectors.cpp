#include "loadseg/detectors.hpp"

#include <algorithm>
#include <numeric>

#include "loadseg/binseg.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/log.hpp"
#include "loadseg/stats.hpp"

namespace loadseg {

ScaledSeries robust_scale(std::span<const double> x, double q_lower,
                          double q_upper) {
  if (x.empty()) throw DataError("robust scaling of an empty series");
  const auto sorted = sorted_copy(x);
  ScaledSeries out;
  auto& p = out.params;
  p.median = quantile_sorted(sorted, 50.0);
  p.distance = quantile_sorted(sorted, q_upper) - quantile_sorted(sorted, q_lower);
  if (!(p.distance > 0.0)) {
    p.fallback_stddev = true;
    p.distance = stddev(x);
    if (!(p.distance > 0.0)) {
      warn("robust scaling: constant series, scores set to zero");
      p.constant = true;
      p.distance = 1.0;
      out.values.assign(x.size(), 0.0);
      return out;
    }
  }
  out.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.values[i] = (x[i] - p.median) / p.distance;
  return out;
}

ScoreSeries spc_score(const DifferenceSeries& series, const SpcConfig& cfg) {
  validate(cfg);
  auto scaled = robust_scale(series.delta, cfg.q_lower, cfg.q_upper);
  return {series.station_id, std::move(scaled.values), Polarity::ZeroCentered};
}

ScoreSeries if_score_per_station(const DifferenceSeries& series,
                                 const IfConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const auto forest =
      IsolationForest::fit(series.delta, cfg.n_estimators, cfg.max_samples, seed);
  return {series.station_id, forest.anomaly_scores(series.delta),
          Polarity::NonNegative};
}

PooledForest fit_pooled_forest(std::span<const DifferenceSeries> all,
                               const IfConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (all.empty()) throw DataError("pooled isolation forest: no stations");
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return all[a].station_id < all[b].station_id;
  });
  std::vector<double> pooled;
  for (auto k : order) {
    const auto scaled = robust_scale(all[k].delta, cfg.q_lower, cfg.q_upper);
    pooled.insert(pooled.end(), scaled.values.begin(), scaled.values.end());
  }
  return {IsolationForest::fit(pooled, cfg.n_estimators, cfg.max_samples, seed),
          cfg.q_lower, cfg.q_upper};
}

ScoreSeries score_with_pooled_forest(const PooledForest& model,
                                     const DifferenceSeries& series) {
  const auto scaled = robust_scale(series.delta, model.q_lower, model.q_upper);
  return {series.station_id, model.forest.anomaly_scores(scaled.values),
          Polarity::NonNegative};
}

std::vector<ScoreSeries> if_score_pooled(std::span<const DifferenceSeries> all,
                                         const IfConfig& cfg,
                                         std::uint64_t seed) {
  const auto model = fit_pooled_forest(all, cfg, seed);
  std::vector<ScoreSeries> out;
  out.reserve(all.size());
  for (const auto& s : all) out.push_back(score_with_pooled_forest(model, s));
  return out;
}

std::vector<double> segment_scores(std::span<const double> z,
                                   std::span<const std::size_t> breakpoints,
                                   double reference) {
  std::vector<double> out(z.size());
  std::size_t begin = 0;
  for (auto end : breakpoints) {
    const double level = mean(z.subspan(begin, end - begin)) - reference;
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(begin),
              out.begin() + static_cast<std::ptrdiff_t>(end), level);
    begin = end;
  }
  return out;
}

BinsegResult binseg_score(const DifferenceSeries& series,
                          const BinsegConfig& cfg) {
  validate(cfg);
  auto scaled = robust_scale(series.delta, cfg.q_lower, cfg.q_upper);
  const auto& z = scaled.values;
  const BinsegParams params{cfg.beta, cfg.min_size, cfg.jump, cfg.penalty};

  BinsegResult out;
  out.scale = scaled.params;
  out.penalty = split_penalty(z, params);
  out.breakpoints = binseg_breakpoints(z, params);
  out.reference_value =
      find_reference_value(z, out.breakpoints, cfg.reference_point);

  out.scores = {series.station_id,
                segment_scores(z, out.breakpoints, out.reference_value),
                Polarity::ZeroCentered};
  return out;
}

}  // namespace loadseg
