#include "loadseg/types.hpp"

#include <cmath>
#include <string>

#include "loadseg/errors.hpp"

namespace loadseg {

std::optional<Label> label_from_int(long value) {
  switch (value) {
    case 0:
      return Label::Normal;
    case 1:
      return Label::Event;
    case 5:
      return Label::Uncertain;
    default:
      return std::nullopt;
  }
}

LengthCategory category_for_length(std::size_t length) {
  if (length <= 24) return LengthCategory::C1;
  if (length <= 288) return LengthCategory::C2;
  if (length <= 4032) return LengthCategory::C3;
  return LengthCategory::C4;
}

std::string_view to_string(LengthCategory c) {
  switch (c) {
    case LengthCategory::C1:
      return "C1";
    case LengthCategory::C2:
      return "C2";
    case LengthCategory::C3:
      return "C3";
    case LengthCategory::C4:
      return "C4";
  }
  return "?";
}

std::optional<LengthCategory> category_from_string(std::string_view s) {
  for (auto c : kAllCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::vector<std::string> to_strings(CategorySet set) {
  std::vector<std::string> out;
  for (auto c : kAllCategories)
    if (set.contains(c)) out.emplace_back(to_string(c));
  return out;
}

CategorySet category_set_from_strings(const std::vector<std::string>& names) {
  CategorySet set;
  for (const auto& n : names) {
    auto c = category_from_string(n);
    if (!c) throw ConfigError("unknown length category '" + n + "'");
    set.insert(*c);
  }
  return set;
}

void StationSeries::validate() const {
  const auto n = timestamps.size();
  if (s.size() != n || b.size() != n || labels.size() != n)
    throw DataError("station '" + station_id +
                    "': timestamps, S, B and labels differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(timestamps[i - 1] < timestamps[i]))
      throw DataError("station '" + station_id +
                      "': timestamps not strictly increasing at row " +
                      std::to_string(i + 1));
}

void DifferenceSeries::validate() const {
  const auto n = delta.size();
  if (timestamps.size() != n || labels.size() != n || s_signed.size() != n)
    throw DataError("difference series '" + station_id +
                    "': field lengths differ");
  for (double d : delta)
    if (!std::isfinite(d))
      throw DataError("difference series '" + station_id +
                      "': delta contains missing values");
}

namespace {

void check_quantiles(double lo, double hi, const char* what) {
  if (!(lo >= 0.0 && lo < hi && hi <= 100.0))
    throw ConfigError(std::string(what) +
                      ": quantiles must satisfy 0 <= q_lower < q_upper <= 100");
}

}  // namespace

void validate(const SpcConfig& cfg) {
  check_quantiles(cfg.q_lower, cfg.q_upper, "SPC");
}

void validate(const IfConfig& cfg) {
  if (cfg.n_estimators < 1)
    throw ConfigError("isolation forest: n_estimators must be >= 1");
  if (cfg.max_samples < 2)
    throw ConfigError("isolation forest: max_samples must be >= 2");
  if (cfg.pooled) check_quantiles(cfg.q_lower, cfg.q_upper, "isolation forest");
}

void validate(const BinsegConfig& cfg) {
  check_quantiles(cfg.q_lower, cfg.q_upper, "binary segmentation");
  if (cfg.min_size < 2)
    throw ConfigError("binary segmentation: min_size must be >= 2");
  if (cfg.jump < 1) throw ConfigError("binary segmentation: jump must be >= 1");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
    throw ConfigError("binary segmentation: beta must be > 0");
}

void validate(const DetectorConfig& cfg) {
  std::visit([](const auto& c) { validate(c); }, cfg);
}

ThresholdStrategy threshold_strategy_of(const DetectorConfig& cfg) {
  if (const auto* spc = std::get_if<SpcConfig>(&cfg))
    return spc->threshold_strategy;
  if (const auto* bs = std::get_if<BinsegConfig>(&cfg))
    return bs->threshold_strategy;
  return ThresholdStrategy::Symmetrical;
}

Polarity polarity_of(const DetectorConfig& cfg) {
  return std::holds_alternative<IfConfig>(cfg) ? Polarity::NonNegative
                                               : Polarity::ZeroCentered;
}

std::string_view to_string(ThresholdStrategy s) {
  return s == ThresholdStrategy::Symmetrical ? "symmetrical" : "asymmetrical";
}

std::string_view to_string(ReferencePoint r) {
  switch (r) {
    case ReferencePoint::Mean:
      return "mean";
    case ReferencePoint::Median:
      return "median";
    case ReferencePoint::LongestMean:
      return "longest_mean";
    case ReferencePoint::LongestMedian:
      return "longest_median";
  }
  return "?";
}

std::string_view to_string(PenaltyScaling p) {
  return p == PenaltyScaling::Linear ? "linear" : "l1";
}

ThresholdStrategy threshold_strategy_from_string(std::string_view s) {
  if (s == "symmetrical") return ThresholdStrategy::Symmetrical;
  if (s == "asymmetrical") return ThresholdStrategy::Asymmetrical;
  throw ConfigError("unknown threshold strategy '" + std::string(s) + "'");
}

ReferencePoint reference_point_from_string(std::string_view s) {
  for (auto r : {ReferencePoint::Mean, ReferencePoint::Median,
                 ReferencePoint::LongestMean, ReferencePoint::LongestMedian})
    if (to_string(r) == s) return r;
  throw ConfigError("unknown reference point '" + std::string(s) + "'");
}

PenaltyScaling penalty_scaling_from_string(std::string_view s) {
  if (s == "linear") return PenaltyScaling::Linear;
  if (s == "l1" || s == "L1") return PenaltyScaling::L1;
  throw ConfigError("unknown penalty scaling '" + std::string(s) + "'");
}

}  // namespace loadseg
