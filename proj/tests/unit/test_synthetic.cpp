#include <gtest/gtest.h>

#include <algorithm>

#include "loadseg/errors.hpp"
#include "loadseg/ingestion.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/synthetic.hpp"

using namespace loadseg;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.length = 8000;
  s.spikes.count = 5;
  s.short_events.count = 3;
  s.switch_c3.count = 1;
  s.switch_c4.count = 0;
  s.uncertain.count = 2;
  s.repeated_bursts = 2;
  s.missing_gaps = 2;
  return s;
}

}  // namespace

TEST(Synthetic, ZeroEventSpecIsAllNormal) {
  SyntheticSpec s;
  s.length = 2000;
  const auto st = generate_synthetic(s, 1);
  EXPECT_TRUE(std::all_of(st.series.labels.begin(), st.series.labels.end(),
                          [](Label l) { return l == Label::Normal; }));
  EXPECT_TRUE(st.inventory.events.empty());
}

TEST(Synthetic, SeedDeterminesBytes) {
  const auto a = generate_synthetic(small_spec(), 5);
  const auto b = generate_synthetic(small_spec(), 5);
  const auto c = generate_synthetic(small_spec(), 6);
  EXPECT_EQ(station_to_csv(a.series), station_to_csv(b.series));
  EXPECT_NE(station_to_csv(a.series), station_to_csv(c.series));
}

TEST(Synthetic, InventoryMatchesRecount) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto st = generate_synthetic(small_spec(), seed);
    CategoryTally want;
    for (const auto& e : st.inventory.events) {
      if (e.kind == "uncertain") continue;
      const auto c = index_of(category_for_length(e.length));
      ++want.events[c];
      want.samples[c] += e.length;
    }
    EXPECT_EQ(tally_events(st.series.labels), want);
    EXPECT_EQ(event_runs(st.series.labels, Label::Uncertain).size(), 2u);
    EXPECT_EQ(st.inventory.bursts.size(), 2u);
  }
}

TEST(Synthetic, EventClassLengths) {
  const auto st = generate_synthetic(small_spec(), 9);
  for (const auto& e : st.inventory.events) {
    if (e.kind == "spike") EXPECT_EQ(category_for_length(e.length), LengthCategory::C1);
    if (e.kind == "short") EXPECT_EQ(category_for_length(e.length), LengthCategory::C2);
    if (e.kind == "switch_c3") EXPECT_EQ(category_for_length(e.length), LengthCategory::C3);
  }
}

TEST(Synthetic, InfeasibleSpec) {
  SyntheticSpec s;
  s.length = 300;
  s.switch_c3.count = 2;
  EXPECT_THROW(generate_synthetic(s, 0), DataError);
}

TEST(Synthetic, FleetIdsAndJson) {
  FleetSpec f;
  f.stations = 4;
  f.base.length = 6000;
  f.c4_rate = 0;
  const auto fleet = generate_fleet(f, 3);
  ASSERT_EQ(fleet.size(), 4u);
  EXPECT_LT(fleet[0].series.station_id, fleet[1].series.station_id);
  nlohmann::json j;
  to_json(j, f);
  FleetSpec back;
  from_json(j, back);
  EXPECT_EQ(back.stations, 4u);
  EXPECT_EQ(back.base.length, 6000u);
}
