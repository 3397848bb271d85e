#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "loadseg/types.hpp"

namespace loadseg {

// Signed apparent power sign(P) * sqrt(P^2 + Q^2), with sign(0) = +1.
// Throws DataError for non-finite input.
double apparent_power(double p_kw, double q_kvar);

// sqrt(3) * V * I scaled to kW. Metering of the current is unsigned, so the
// result is always >= 0; sign correction happens during preprocessing.
// `scale` converts V*A to kW (1e-3 for base units).
double apparent_power_vi(double volts, double amps, double scale = 1e-3);

struct LoadOptions {
  double vi_scale = 1e-3;
  // When false an empty label cell reads as 0 (for unlabelled production
  // data).
  bool require_labels = true;
};

// Reads a station CSV with header `timestamp,P,Q,V,I,S,B,label` (columns in
// any order). Leading lines starting with '#' are comments; a comment
// `# signed` or `# signed=true` declares the station sign capable. S is taken
// verbatim if present, else computed from (P, Q), else from (V, I); a row
// with none of these is a missing measurement (NaN). The station id is the
// file stem. Throws DataError naming the offending row.
StationSeries load_station(const std::filesystem::path& path,
                           const LoadOptions& options = {});
StationSeries parse_station_csv(std::string_view text, std::string station_id,
                                const LoadOptions& options = {});

// Writes the canonical CSV form (S column filled, P/Q/V/I empty).
std::string station_to_csv(const StationSeries& station);
void write_station(const std::filesystem::path& path,
                   const StationSeries& station);

std::vector<StationSeries> load_stations(const std::filesystem::path& dir,
                                         const LoadOptions& options = {});

// ---------------------------------------------------------------------------
// Train / validation / test assignment

enum class Split : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

using SplitAssignment = std::map<std::string, Split>;

std::string split_to_csv(const SplitAssignment& split);
SplitAssignment parse_split_csv(std::string_view text);
SplitAssignment load_split(const std::filesystem::path& path);

}  // namespace loadseg
