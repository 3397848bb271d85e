#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadseg/types.hpp"

namespace loadseg {

struct LengthRange {
  std::size_t min = 1;
  std::size_t max = 1;
};

struct MagnitudeRange {
  double min = 0.0;
  double max = 0.0;
};

// One family of injected events. Every event adds a constant offset of
// random magnitude and sign to S (the bottom-up load does not see it) and
// is labelled 1.
struct EventClassSpec {
  std::size_t count = 0;
  LengthRange length;
  MagnitudeRange magnitude;  // kW, absolute value
  double negative_fraction = 0.5;
};

// Recipe for one synthetic station. Loads are in kW.
struct SyntheticSpec {
  std::string station_id = "synthetic";
  std::size_t length = 35040;
  Timestamp start{1672531200};  // 2023-01-01T00:00:00Z

  // Normal load: base + annual and daily sinusoids.
  double base_level = 4000.0;
  double annual_amplitude = 1200.0;
  double daily_amplitude = 700.0;
  // Measurement noise on S.
  double noise_sigma = 40.0;
  // Slowly varying mismatch between S and the bottom-up load: AR(1) with the
  // given coefficient and stationary standard deviation.
  double mismatch_ar = 0.97;
  double mismatch_sigma = 60.0;

  // Bottom-up distortion: S ~ slope * B + offset on normal data.
  double bottom_up_slope = 1.15;
  double bottom_up_offset = 120.0;
  double bottom_up_noise = 30.0;

  EventClassSpec spikes{0, {1, 24}, {600.0, 1500.0}, 0.5};
  EventClassSpec short_events{0, {25, 288}, {400.0, 1000.0}, 0.5};
  EventClassSpec switch_c3{0, {289, 4032}, {500.0, 1500.0}, 0.3};
  EventClassSpec switch_c4{0, {4033, 8000}, {500.0, 1500.0}, 0.3};

  // Spans labelled 5 carrying a small offset.
  EventClassSpec uncertain{0, {10, 100}, {100.0, 300.0}, 0.5};

  // Communication errors: S frozen at one value, and bottom-up gaps.
  std::size_t repeated_bursts = 0;
  LengthRange burst_length{6, 12};
  std::size_t missing_gaps = 0;
  LengthRange gap_length{4, 96};

  // Unsigned metering: S reported as |S|.
  bool hide_signs = false;
};

struct InjectedEvent {
  std::string kind;  // spike, short, switch_c3, switch_c4, uncertain
  std::size_t start = 0;
  std::size_t length = 0;
  double offset = 0.0;
};

struct GenerationInventory {
  std::vector<InjectedEvent> events;
  std::vector<InjectedEvent> bursts;
  std::vector<InjectedEvent> gaps;
  // Extremes of S over normal samples that survive preprocessing (not in a
  // burst or a bottom-up gap). These are the ground-truth load bounds.
  double normal_max = 0.0;
  double normal_min = 0.0;
  std::size_t event_samples = 0;
};

struct SyntheticStation {
  StationSeries series;
  GenerationInventory inventory;
};

// Deterministic given (spec, seed). Events, bursts, gaps and uncertain spans
// never overlap and are separated by at least one untouched sample. Throws
// DataError when the requested items cannot be placed.
SyntheticStation generate_synthetic(const SyntheticSpec& spec,
                                    std::uint64_t seed);

// A population of stations with randomized event counts and load shapes.
struct FleetSpec {
  std::size_t stations = 30;
  std::string id_prefix = "station_";
  SyntheticSpec base;
  // Poisson means of per-station event counts.
  double spikes_rate = 6.0;
  double short_rate = 2.5;
  double c3_rate = 0.8;
  double c4_rate = 0.35;
  double uncertain_rate = 0.5;
  double bursts_rate = 1.0;
  double gaps_rate = 1.0;
  // Fraction of stations whose load crosses zero (local generation).
  double generation_fraction = 0.35;
  // Fraction of stations with unsigned metering.
  double unsigned_fraction = 0.2;
  // Multiplicative spread on the base level and amplitudes.
  double level_spread = 0.3;
};

std::vector<SyntheticStation> generate_fleet(const FleetSpec& spec,
                                             std::uint64_t seed);

void to_json(nlohmann::json& j, const LengthRange& r);
void from_json(const nlohmann::json& j, LengthRange& r);
void to_json(nlohmann::json& j, const MagnitudeRange& r);
void from_json(const nlohmann::json& j, MagnitudeRange& r);
void to_json(nlohmann::json& j, const EventClassSpec& e);
void from_json(const nlohmann::json& j, EventClassSpec& e);
void to_json(nlohmann::json& j, const SyntheticSpec& s);
void from_json(const nlohmann::json& j, SyntheticSpec& s);
void to_json(nlohmann::json& j, const FleetSpec& s);
void from_json(const nlohmann::json& j, FleetSpec& s);
void to_json(nlohmann::json& j, const GenerationInventory& inv);

}  // namespace loadseg
