#include "loadseg/load_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "loadseg/errors.hpp"

namespace loadseg {

std::string_view to_string(EstimateSource s) {
  switch (s) {
    case EstimateSource::GroundTruthFiltered:
      return "ground_truth";
    case EstimateSource::PredictionFiltered:
      return "predicted";
    case EstimateSource::Unfiltered:
      return "unfiltered";
  }
  return "?";
}

namespace {

template <typename Keep>
LoadEstimate estimate(const DifferenceSeries& series, EstimateSource source,
                      Keep keep) {
  LoadEstimate e{series.station_id, 0.0, std::nullopt, source};
  bool any = false;
  double lo = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!keep(i)) continue;
    const double v = series.s_signed[i];
    if (!any) {
      e.max_load = lo = v;
      any = true;
    } else {
      e.max_load = std::max(e.max_load, v);
      lo = std::min(lo, v);
    }
  }
  if (!any)
    throw DataError("station '" + series.station_id + "': fully filtered");
  if (std::any_of(series.s_signed.begin(), series.s_signed.end(),
                  [](double v) { return v < 0.0; }))
    e.min_load = lo;
  return e;
}

}  // namespace

LoadEstimate load_estimate(const DifferenceSeries& series,
                           const PredictionSeries& mask) {
  if (mask.size() != series.size())
    throw DataError("station '" + series.station_id +
                    "': mask and series differ in length");
  return estimate(series, EstimateSource::PredictionFiltered,
                  [&](std::size_t i) { return mask.predictions[i] == 0; });
}

LoadEstimate load_estimate_ground_truth(const DifferenceSeries& series) {
  return estimate(series, EstimateSource::GroundTruthFiltered,
                  [&](std::size_t i) { return series.labels[i] == Label::Normal; });
}

LoadEstimate load_estimate_unfiltered(const DifferenceSeries& series) {
  return estimate(series, EstimateSource::Unfiltered,
                  [](std::size_t) { return true; });
}

namespace {

BoundError compare(const std::string& id, bool is_max, double truth,
                   double predicted, double margin) {
  BoundError e{id, is_max, truth, predicted, std::nullopt, false, false};
  if (truth == 0.0) return e;
  const double rel = (predicted - truth) / std::abs(truth);
  e.relative_error = rel;
  e.exact = std::abs(rel) <= kExactRelativeTolerance;
  e.within_margin = std::abs(rel) <= margin * (1.0 + 1e-12);
  return e;
}

void summarize(BoundSummary& s, const BoundError& e) {
  if (!e.relative_error) {
    ++s.undefined;
    return;
  }
  ++s.stations;
  s.fraction_exact += e.exact ? 1.0 : 0.0;
  s.fraction_within_margin += e.within_margin ? 1.0 : 0.0;
}

void finish(BoundSummary& s) {
  if (s.stations == 0) return;
  s.fraction_exact /= static_cast<double>(s.stations);
  s.fraction_within_margin /= static_cast<double>(s.stations);
}

}  // namespace

EstimateErrorTable estimate_errors(std::span<const LoadEstimate> truth,
                                   std::span<const LoadEstimate> predicted,
                                   double margin) {
  if (!(margin >= 0.0)) throw ConfigError("error margin must be >= 0");
  std::map<std::string, const LoadEstimate*> pred;
  for (const auto& p : predicted)
    if (!pred.emplace(p.station_id, &p).second)
      throw DataError("duplicate estimate for station '" + p.station_id + "'");
  if (pred.size() != truth.size())
    throw DataError("truth and predicted estimates cover different stations");

  EstimateErrorTable t;
  t.margin = margin;
  for (const auto& tr : truth) {
    const auto it = pred.find(tr.station_id);
    if (it == pred.end())
      throw DataError("no predicted estimate for station '" + tr.station_id +
                      "'");
    const auto& p = *it->second;
    t.rows.push_back(
        compare(tr.station_id, true, tr.max_load, p.max_load, margin));
    summarize(t.max, t.rows.back());
    if (tr.min_load.has_value() != p.min_load.has_value())
      throw DataError("station '" + tr.station_id +
                      "': minimum reported on one side only");
    if (tr.min_load) {
      t.rows.push_back(
          compare(tr.station_id, false, *tr.min_load, *p.min_load, margin));
      summarize(t.min, t.rows.back());
    }
  }
  finish(t.max);
  finish(t.min);
  return t;
}

}  // namespace loadseg
