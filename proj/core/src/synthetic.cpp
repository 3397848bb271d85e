#include "loadseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "loadseg/errors.hpp"
#include "loadseg/random.hpp"

namespace loadseg {
namespace {

constexpr double kSamplesPerDay = 96.0;
constexpr double kSamplesPerYear = 96.0 * 365.0;

struct Placement {
  std::string kind;
  std::size_t length = 0;
  const EventClassSpec* cls = nullptr;
};

std::size_t draw_length(Rng& rng, LengthRange r) {
  if (r.max < r.min || r.min == 0)
    throw ConfigError("synthetic spec: invalid length range");
  return static_cast<std::size_t>(
      rng.integer(static_cast<std::int64_t>(r.min),
                  static_cast<std::int64_t>(r.max)));
}

// Occupancy with a one-sample margin so that neighbouring items never merge
// into one run.
class Occupancy {
 public:
  explicit Occupancy(std::size_t n) : used_(n, false) {}

  bool fits(std::size_t start, std::size_t len) const {
    if (start + len > used_.size()) return false;
    const std::size_t lo = start == 0 ? 0 : start - 1;
    const std::size_t hi = std::min(used_.size(), start + len + 1);
    for (std::size_t i = lo; i < hi; ++i)
      if (used_[i]) return false;
    return true;
  }

  void mark(std::size_t start, std::size_t len) {
    std::fill(used_.begin() + static_cast<std::ptrdiff_t>(start),
              used_.begin() + static_cast<std::ptrdiff_t>(start + len), true);
  }

 private:
  std::vector<bool> used_;
};

std::size_t place(Rng& rng, Occupancy& occ, std::size_t n, std::size_t len,
                  const std::string& what) {
  if (len > n)
    throw DataError("synthetic spec infeasible: " + what +
                    " longer than the series");
  for (int attempt = 0; attempt < 2000; ++attempt) {
    const auto start = rng.index(n - len + 1);
    if (occ.fits(start, len)) {
      occ.mark(start, len);
      return start;
    }
  }
  // Fall back to a linear scan from a random origin before giving up.
  const auto origin = rng.index(n - len + 1);
  for (std::size_t k = 0; k <= n - len; ++k) {
    const auto start = (origin + k) % (n - len + 1);
    if (occ.fits(start, len)) {
      occ.mark(start, len);
      return start;
    }
  }
  throw DataError("synthetic spec infeasible: cannot place " + what +
                  " of length " + std::to_string(len));
}

}  // namespace

SyntheticStation generate_synthetic(const SyntheticSpec& spec,
                                    std::uint64_t seed) {
  const std::size_t n = spec.length;
  if (n < 2) throw ConfigError("synthetic spec: length must be >= 2");
  Rng rng(seed);

  // Draw every item length first so feasibility is decided up front.
  std::vector<Placement> items;
  auto add_class = [&](const EventClassSpec& cls, const std::string& kind) {
    for (std::size_t k = 0; k < cls.count; ++k)
      items.push_back({kind, draw_length(rng, cls.length), &cls});
  };
  add_class(spec.switch_c4, "switch_c4");
  add_class(spec.switch_c3, "switch_c3");
  add_class(spec.short_events, "short");
  add_class(spec.spikes, "spike");
  add_class(spec.uncertain, "uncertain");
  for (std::size_t k = 0; k < spec.repeated_bursts; ++k)
    items.push_back({"burst", draw_length(rng, spec.burst_length), nullptr});
  for (std::size_t k = 0; k < spec.missing_gaps; ++k)
    items.push_back({"gap", draw_length(rng, spec.gap_length), nullptr});

  std::size_t demand = 0;
  for (const auto& it : items) demand += it.length + 1;
  if (demand > n)
    throw DataError("synthetic spec infeasible: injected items need " +
                    std::to_string(demand) + " samples but the series has " +
                    std::to_string(n));

  std::stable_sort(items.begin(), items.end(),
                   [](const Placement& a, const Placement& b) {
                     return a.length > b.length;
                   });

  // Normal regime.
  SyntheticStation out;
  auto& st = out.series;
  st.station_id = spec.station_id;
  st.timestamps.resize(n);
  st.s.resize(n);
  st.b.resize(n);
  st.labels.assign(n, Label::Normal);

  const double phase_year = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double ar = spec.mismatch_ar;
  const double innovation = spec.mismatch_sigma * std::sqrt(1.0 - ar * ar);
  double mismatch = rng.normal(0.0, spec.mismatch_sigma);
  if (spec.bottom_up_slope == 0.0)
    throw ConfigError("synthetic spec: bottom_up_slope must be non-zero");

  for (std::size_t i = 0; i < n; ++i) {
    st.timestamps[i] = {spec.start.epoch_seconds +
                        static_cast<std::int64_t>(i) * kSampleIntervalSeconds};
    const double t = static_cast<double>(i);
    const double truth =
        spec.base_level +
        spec.annual_amplitude *
            std::cos(2.0 * std::numbers::pi * t / kSamplesPerYear + phase_year) -
        spec.daily_amplitude *
            std::cos(2.0 * std::numbers::pi * t / kSamplesPerDay);
    mismatch = ar * mismatch + innovation * rng.normal();
    st.s[i] = truth + mismatch + rng.normal(0.0, spec.noise_sigma);
    st.b[i] = (truth - spec.bottom_up_offset) / spec.bottom_up_slope +
              rng.normal(0.0, spec.bottom_up_noise);
  }

  Occupancy occ(n);
  std::vector<bool> removed(n, false);
  for (const auto& it : items) {
    const auto start = place(rng, occ, n, it.length, it.kind);
    InjectedEvent ev{it.kind, start, it.length, 0.0};
    if (it.kind == "burst") {
      for (std::size_t i = start; i < start + it.length; ++i) {
        st.s[i] = st.s[start];
        removed[i] = true;
      }
      out.inventory.bursts.push_back(ev);
    } else if (it.kind == "gap") {
      for (std::size_t i = start; i < start + it.length; ++i) {
        st.b[i] = std::numeric_limits<double>::quiet_NaN();
        removed[i] = true;
      }
      out.inventory.gaps.push_back(ev);
    } else {
      const auto& cls = *it.cls;
      const double mag = rng.uniform(cls.magnitude.min, cls.magnitude.max);
      ev.offset = rng.bernoulli(cls.negative_fraction) ? -mag : mag;
      const Label label =
          it.kind == "uncertain" ? Label::Uncertain : Label::Event;
      for (std::size_t i = start; i < start + it.length; ++i) {
        st.s[i] += ev.offset;
        st.labels[i] = label;
      }
      if (label == Label::Event) out.inventory.event_samples += it.length;
      out.inventory.events.push_back(ev);
    }
  }
  std::sort(out.inventory.events.begin(), out.inventory.events.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });

  if (spec.hide_signs)
    for (auto& x : st.s) x = std::abs(x);
  st.sign_capable = false;
  for (double x : st.s)
    if (x < 0.0) st.sign_capable = true;

  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (st.labels[i] != Label::Normal || removed[i]) continue;
    hi = std::max(hi, st.s[i]);
    lo = std::min(lo, st.s[i]);
  }
  out.inventory.normal_max = hi;
  out.inventory.normal_min = lo;
  return out;
}

std::vector<SyntheticStation> generate_fleet(const FleetSpec& spec,
                                             std::uint64_t seed) {
  std::vector<SyntheticStation> out;
  out.reserve(spec.stations);
  const int width = spec.stations >= 100 ? 3 : 2;
  for (std::size_t k = 0; k < spec.stations; ++k) {
    Rng rng(mix_seed(seed, 2 * k));
    SyntheticSpec s = spec.base;
    std::string num = std::to_string(k + 1);
    if (static_cast<int>(num.size()) < width)
      num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
    s.station_id = spec.id_prefix + num;

    const double scale = std::exp(rng.uniform(-spec.level_spread, spec.level_spread));
    s.base_level *= scale;
    s.annual_amplitude *= scale;
    s.daily_amplitude *= scale;
    if (rng.bernoulli(spec.generation_fraction)) {
      // Local generation pulls the load through zero around midday.
      s.base_level *= 0.15;
      s.daily_amplitude *= 1.6;
    }
    s.hide_signs = rng.bernoulli(spec.unsigned_fraction);
    s.bottom_up_slope *= std::exp(rng.uniform(-0.15, 0.15));
    s.bottom_up_offset *= rng.uniform(0.5, 1.5);

    s.spikes.count = rng.poisson(spec.spikes_rate);
    s.short_events.count = rng.poisson(spec.short_rate);
    s.switch_c3.count = rng.poisson(spec.c3_rate);
    s.switch_c4.count = rng.poisson(spec.c4_rate);
    s.uncertain.count = rng.poisson(spec.uncertain_rate);
    s.repeated_bursts = rng.poisson(spec.bursts_rate);
    s.missing_gaps = rng.poisson(spec.gaps_rate);
    // Keep long events within the series.
    while (s.switch_c4.count > 0 &&
           s.switch_c4.count * (s.switch_c4.length.max + 1) > s.length / 2)
      --s.switch_c4.count;

    out.push_back(generate_synthetic(s, mix_seed(seed, 2 * k + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const LengthRange& r) {
  j = nlohmann::json::array({r.min, r.max});
}
void from_json(const nlohmann::json& j, LengthRange& r) {
  r.min = j.at(0).get<std::size_t>();
  r.max = j.at(1).get<std::size_t>();
}
void to_json(nlohmann::json& j, const MagnitudeRange& r) {
  j = nlohmann::json::array({r.min, r.max});
}
void from_json(const nlohmann::json& j, MagnitudeRange& r) {
  r.min = j.at(0).get<double>();
  r.max = j.at(1).get<double>();
}
void to_json(nlohmann::json& j, const EventClassSpec& e) {
  j = {{"count", e.count},
       {"length", e.length},
       {"magnitude", e.magnitude},
       {"negative_fraction", e.negative_fraction}};
}
void from_json(const nlohmann::json& j, EventClassSpec& e) {
  e.count = j.value("count", e.count);
  if (j.contains("length")) j.at("length").get_to(e.length);
  if (j.contains("magnitude")) j.at("magnitude").get_to(e.magnitude);
  e.negative_fraction = j.value("negative_fraction", e.negative_fraction);
}

template <typename T>
void get_opt(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  j = {{"station_id", s.station_id},
       {"length", s.length},
       {"start_epoch_seconds", s.start.epoch_seconds},
       {"base_level", s.base_level},
       {"annual_amplitude", s.annual_amplitude},
       {"daily_amplitude", s.daily_amplitude},
       {"noise_sigma", s.noise_sigma},
       {"mismatch_ar", s.mismatch_ar},
       {"mismatch_sigma", s.mismatch_sigma},
       {"bottom_up_slope", s.bottom_up_slope},
       {"bottom_up_offset", s.bottom_up_offset},
       {"bottom_up_noise", s.bottom_up_noise},
       {"spikes", s.spikes},
       {"short_events", s.short_events},
       {"switch_c3", s.switch_c3},
       {"switch_c4", s.switch_c4},
       {"uncertain", s.uncertain},
       {"repeated_bursts", s.repeated_bursts},
       {"burst_length", s.burst_length},
       {"missing_gaps", s.missing_gaps},
       {"gap_length", s.gap_length},
       {"hide_signs", s.hide_signs}};
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  get_opt(j, "station_id", s.station_id);
  get_opt(j, "length", s.length);
  get_opt(j, "start_epoch_seconds", s.start.epoch_seconds);
  get_opt(j, "base_level", s.base_level);
  get_opt(j, "annual_amplitude", s.annual_amplitude);
  get_opt(j, "daily_amplitude", s.daily_amplitude);
  get_opt(j, "noise_sigma", s.noise_sigma);
  get_opt(j, "mismatch_ar", s.mismatch_ar);
  get_opt(j, "mismatch_sigma", s.mismatch_sigma);
  get_opt(j, "bottom_up_slope", s.bottom_up_slope);
  get_opt(j, "bottom_up_offset", s.bottom_up_offset);
  get_opt(j, "bottom_up_noise", s.bottom_up_noise);
  get_opt(j, "spikes", s.spikes);
  get_opt(j, "short_events", s.short_events);
  get_opt(j, "switch_c3", s.switch_c3);
  get_opt(j, "switch_c4", s.switch_c4);
  get_opt(j, "uncertain", s.uncertain);
  get_opt(j, "repeated_bursts", s.repeated_bursts);
  get_opt(j, "burst_length", s.burst_length);
  get_opt(j, "missing_gaps", s.missing_gaps);
  get_opt(j, "gap_length", s.gap_length);
  get_opt(j, "hide_signs", s.hide_signs);
}

void to_json(nlohmann::json& j, const FleetSpec& s) {
  j = {{"stations", s.stations},
       {"id_prefix", s.id_prefix},
       {"base", s.base},
       {"spikes_rate", s.spikes_rate},
       {"short_rate", s.short_rate},
       {"c3_rate", s.c3_rate},
       {"c4_rate", s.c4_rate},
       {"uncertain_rate", s.uncertain_rate},
       {"bursts_rate", s.bursts_rate},
       {"gaps_rate", s.gaps_rate},
       {"generation_fraction", s.generation_fraction},
       {"unsigned_fraction", s.unsigned_fraction},
       {"level_spread", s.level_spread}};
}

void from_json(const nlohmann::json& j, FleetSpec& s) {
  get_opt(j, "stations", s.stations);
  get_opt(j, "id_prefix", s.id_prefix);
  get_opt(j, "base", s.base);
  get_opt(j, "spikes_rate", s.spikes_rate);
  get_opt(j, "short_rate", s.short_rate);
  get_opt(j, "c3_rate", s.c3_rate);
  get_opt(j, "c4_rate", s.c4_rate);
  get_opt(j, "uncertain_rate", s.uncertain_rate);
  get_opt(j, "bursts_rate", s.bursts_rate);
  get_opt(j, "gaps_rate", s.gaps_rate);
  get_opt(j, "generation_fraction", s.generation_fraction);
  get_opt(j, "unsigned_fraction", s.unsigned_fraction);
  get_opt(j, "level_spread", s.level_spread);
}

void to_json(nlohmann::json& j, const GenerationInventory& inv) {
  auto items = [](const std::vector<InjectedEvent>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v)
      a.push_back({{"kind", e.kind},
                   {"start", e.start},
                   {"length", e.length},
                   {"offset", e.offset}});
    return a;
  };
  j = {{"events", items(inv.events)},
       {"bursts", items(inv.bursts)},
       {"gaps", items(inv.gaps)},
       {"normal_max", inv.normal_max},
       {"normal_min", inv.normal_min},
       {"event_samples", inv.event_samples}};
}

}  // namespace loadseg
