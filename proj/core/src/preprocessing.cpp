#include "loadseg/preprocessing.hpp"

#include <algorithm>
#include <cmath>

#include "loadseg/errors.hpp"
#include "loadseg/log.hpp"
#include "loadseg/stats.hpp"

namespace loadseg {

void PreprocessConfig::validate() const {
  if (max_repeats < 1)
    throw ConfigError("preprocessing: max_repeats must be >= 1");
  if (!(q_lower >= 0.0 && q_lower < q_upper && q_upper <= 100.0))
    throw ConfigError(
        "preprocessing: quantiles must satisfy 0 <= q_lower < q_upper <= 100");
}

bool bottom_up_missing(double b) { return std::isnan(b); }

bool repeated_measurements(std::span<const double> s, std::size_t i,
                           std::size_t r) {
  if (i >= s.size()) return false;
  const double v = s[i];
  const std::size_t lo = i >= r ? i - r : 0;
  const std::size_t hi = std::min(s.size() - 1, i + r);
  std::size_t first = i;
  while (first > lo && s[first - 1] == v) --first;
  std::size_t last = i;
  while (last < hi && s[last + 1] == v) ++last;
  return last - first + 1 >= r;
}

namespace {

FitResult fit_line(std::span<const double> b, std::span<const double> s,
                   const std::string& station_id) {
  const auto n = static_cast<long double>(b.size());
  long double mb = 0, ms = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    mb += b[k];
    ms += s[k];
  }
  mb /= n;
  ms /= n;
  long double sbb = 0, sbs = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    sbb += (b[k] - mb) * (b[k] - mb);
    sbs += (b[k] - mb) * (s[k] - ms);
  }
  FitResult fit;
  if (sbb == 0) {
    warn("station '" + station_id +
         "': bottom-up load constant inside the fit band; using slope 0");
    fit.slope = 0.0;
    fit.offset = static_cast<double>(ms);
    fit.degenerate = true;
    return fit;
  }
  fit.slope = static_cast<double>(sbs / sbb);
  fit.offset = static_cast<double>(ms - (sbs / sbb) * mb);
  return fit;
}

}  // namespace

PreprocessResult preprocess(const StationSeries& station,
                            const PreprocessConfig& cfg) {
  cfg.validate();
  station.validate();
  const std::size_t n = station.size();

  // Every removal decision is made against the original sequence.
  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(station.s[i]) || bottom_up_missing(station.b[i]) ||
        repeated_measurements(station.s, i, cfg.max_repeats))
      continue;
    keep.push_back(i);
  }
  if (keep.empty())
    throw DataError("station '" + station.station_id +
                    "': every sample removed during preprocessing");

  std::vector<double> s, b;
  s.reserve(keep.size());
  b.reserve(keep.size());
  for (auto i : keep) {
    s.push_back(station.s[i]);
    b.push_back(station.b[i]);
  }

  const auto sorted = sorted_copy(s);
  const double q_min = quantile_sorted(sorted, cfg.q_lower);
  const double q_max = quantile_sorted(sorted, cfg.q_upper);
  std::vector<double> s_band, b_band;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] > q_min && s[k] < q_max) {
      s_band.push_back(s[k]);
      b_band.push_back(b[k]);
    }
  }
  if (s_band.size() < 2)
    throw DataError("station '" + station.station_id +
                    "': fewer than two samples inside the fit band");

  PreprocessResult out;
  out.fit = fit_line(b_band, s_band, station.station_id);
  out.removed_count = n - keep.size();

  std::vector<double> b_scaled(b.size());
  for (std::size_t k = 0; k < b.size(); ++k)
    b_scaled[k] = out.fit.slope * b[k] + out.fit.offset;

  const double min_s = sorted.front();
  const double min_b = *std::min_element(b_scaled.begin(), b_scaled.end());
  out.sign_corrected = min_s >= 0.0 && min_b < 0.0;

  auto& ds = out.series;
  ds.station_id = station.station_id;
  ds.timestamps.reserve(keep.size());
  ds.labels.reserve(keep.size());
  ds.delta.resize(keep.size());
  ds.s_signed.resize(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    ds.timestamps.push_back(station.timestamps[keep[k]]);
    ds.labels.push_back(station.labels[keep[k]]);
    double signed_s = s[k];
    if (out.sign_corrected && b_scaled[k] < 0.0) signed_s = -signed_s;
    ds.s_signed[k] = signed_s;
    ds.delta[k] = signed_s - b_scaled[k];
  }
  return out;
}

}  // namespace loadseg
