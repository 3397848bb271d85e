#include "loadseg/split.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "loadseg/errors.hpp"

namespace loadseg {

namespace {
constexpr std::size_t kSplits = 3;
}

SplitAssignment stratified_split(
    std::span<const std::pair<std::string, CategoryTally>> tallies) {
  const std::size_t n = tallies.size();
  if (n < kSplits)
    throw DataError("stratified split needs at least 3 stations, got " +
                    std::to_string(n));
  {
    std::set<std::string> ids;
    for (const auto& [id, t] : tallies)
      if (!ids.insert(id).second)
        throw DataError("duplicate station id '" + id + "'");
  }

  const std::size_t base = n / kSplits;
  const std::size_t extra = n % kSplits;
  std::array<std::size_t, kSplits> size{};
  std::array<CategoryTally, kSplits> events{};
  std::vector<int> assigned(n, -1);

  auto eligible = [&](std::size_t s) {
    if (size[s] < base) return true;
    if (size[s] > base) return false;
    const auto full = static_cast<std::size_t>(std::count_if(
        size.begin(), size.end(), [&](std::size_t z) { return z > base; }));
    return full < extra;
  };

  auto assign = [&](std::size_t station, std::size_t s) {
    assigned[station] = static_cast<int>(s);
    ++size[s];
    events[s] += tallies[station].second;
  };

  for (auto it = kAllCategories.rbegin(); it != kAllCategories.rend(); ++it) {
    const auto c = index_of(*it);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
      if (assigned[i] < 0 && tallies[i].second.events[c] > 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      const auto ea = tallies[a].second.events[c];
      const auto eb = tallies[b].second.events[c];
      if (ea != eb) return ea > eb;
      return tallies[a].first < tallies[b].first;
    });
    for (auto station : order) {
      std::size_t best = kSplits;
      for (std::size_t s = 0; s < kSplits; ++s) {
        if (!eligible(s)) continue;
        if (best == kSplits || events[s].events[c] < events[best].events[c] ||
            (events[s].events[c] == events[best].events[c] &&
             size[s] < size[best]))
          best = s;
      }
      assign(station, best);
    }
  }

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (assigned[i] < 0) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](auto a, auto b) {
    return tallies[a].first < tallies[b].first;
  });
  for (auto station : rest) {
    std::size_t best = kSplits;
    for (std::size_t s = 0; s < kSplits; ++s)
      if (eligible(s) && (best == kSplits || size[s] < size[best])) best = s;
    assign(station, best);
  }

  SplitAssignment out;
  for (std::size_t i = 0; i < n; ++i)
    out.emplace(tallies[i].first, static_cast<Split>(assigned[i]));
  return out;
}

SplitAssignment stratified_split(std::span<const StationSeries> stations,
                                 std::uint64_t /*seed*/) {
  std::vector<std::pair<std::string, CategoryTally>> tallies;
  tallies.reserve(stations.size());
  for (const auto& st : stations)
    tallies.emplace_back(st.station_id, tally_events(st.labels, st.timestamps));
  return stratified_split(tallies);
}

std::array<CategoryTally, 3> split_tally(std::span<const StationSeries> stations,
                                         const SplitAssignment& split) {
  std::array<CategoryTally, 3> out{};
  for (const auto& st : stations) {
    auto it = split.find(st.station_id);
    if (it == split.end())
      throw DataError("station '" + st.station_id + "' missing from split");
    out[static_cast<std::size_t>(it->second)] += tally_events(st.labels, st.timestamps);
  }
  return out;
}

}  // namespace loadseg
