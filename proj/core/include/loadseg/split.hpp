#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "loadseg/ingestion.hpp"
#include "loadseg/runs.hpp"

namespace loadseg {

// Greedy stratified assignment of stations to k = 3 splits.
//
// Categories are processed from C4 down to C1. Within a category, unassigned
// stations that contain events of it are taken in order of decreasing event
// count (station id breaks ties) and each goes to the eligible split with the
// fewest events of that category so far; ties go to the smaller split, then
// the lower split index. Event-free stations are dealt last to the smallest
// split. A split is eligible only while it can still end with floor(N/3) or
// ceil(N/3) stations, so final sizes differ by at most one.
//
// `seed` is accepted for interface stability; the procedure is fully
// deterministic and does not consume randomness.
SplitAssignment stratified_split(std::span<const StationSeries> stations,
                                 std::uint64_t seed = 0);

// Same, from precomputed per-station tallies (ids must be unique).
SplitAssignment stratified_split(
    std::span<const std::pair<std::string, CategoryTally>> tallies);

// Event and sample counts per split, indexed by Split.
std::array<CategoryTally, 3> split_tally(
    std::span<const StationSeries> stations, const SplitAssignment& split);

}  // namespace loadseg
