#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "loadseg/random.hpp"
#include "loadseg/types.hpp"

namespace loadseg::test {

inline std::vector<Timestamp> regular_timestamps(std::size_t n,
                                                 std::int64_t start = 1672531200) {
  std::vector<Timestamp> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = {start + static_cast<std::int64_t>(i) * kSampleIntervalSeconds};
  return t;
}

inline std::vector<Label> labels_from(std::initializer_list<int> v) {
  std::vector<Label> out;
  for (int x : v) out.push_back(*label_from_int(x));
  return out;
}

// Labels with events of the given lengths placed after `gap` normal samples
// each.
inline std::vector<Label> labels_with_events(std::vector<std::size_t> lengths,
                                             std::size_t gap = 10) {
  std::vector<Label> out;
  for (auto len : lengths) {
    out.insert(out.end(), gap, Label::Normal);
    out.insert(out.end(), len, Label::Event);
  }
  out.insert(out.end(), gap, Label::Normal);
  return out;
}

inline DifferenceSeries make_series(std::string id, std::vector<double> delta,
                                    std::vector<Label> labels) {
  DifferenceSeries d;
  d.station_id = std::move(id);
  d.timestamps = regular_timestamps(delta.size());
  d.s_signed = delta;
  d.delta = std::move(delta);
  d.labels = std::move(labels);
  return d;
}

// Noise plus a constant offset on every event sample.
inline DifferenceSeries noisy_series(std::string id, const std::vector<Label>& labels,
                                     double offset, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> d(labels.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = rng.normal(0.0, sigma) + (labels[i] == Label::Event ? offset : 0.0);
  return make_series(std::move(id), std::move(d), labels);
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace loadseg::test
