#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadseg/types.hpp"

namespace loadseg {

// A maximal block of identical labels. `end` is inclusive.
struct Run {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length = 0;
  LengthCategory category = LengthCategory::C1;

  friend bool operator==(const Run&, const Run&) = default;
};

// Maximal contiguous runs of `target`, in index order, measured in samples.
std::vector<Run> event_runs(std::span<const Label> labels, Label target);
// Same, but a run also ends where consecutive timestamps are more than one
// sample interval apart, so an event interrupted by removed samples becomes
// separate runs on the surviving sequence.
std::vector<Run> event_runs(std::span<const Label> labels, Label target,
                            std::span<const Timestamp> timestamps);

// Per-sample view used by every metric: the ground-truth label plus, for
// event samples, the length category of the run the sample belongs to.
// Keeping the category alongside each sample lets callers evaluate
// subsequences (e.g. the residual of a sequential ensemble) against the
// categories of the original events.
struct CategorizedLabels {
  std::vector<Label> labels;
  // Meaningful only where labels[i] == Label::Event.
  std::vector<LengthCategory> categories;

  std::size_t size() const { return labels.size(); }
  CategorizedLabels subset(std::span<const std::size_t> indices) const;
};

CategorizedLabels categorize(std::span<const Label> labels);
CategorizedLabels categorize(std::span<const Label> labels,
                             std::span<const Timestamp> timestamps);
CategorizedLabels categorize(const DifferenceSeries& series);

// Number of event runs and event samples per category.
struct CategoryTally {
  std::array<std::size_t, kNumCategories> events{};
  std::array<std::size_t, kNumCategories> samples{};

  CategoryTally& operator+=(const CategoryTally& o);
  friend bool operator==(const CategoryTally&, const CategoryTally&) = default;
};

CategoryTally tally_events(std::span<const Label> labels);
CategoryTally tally_events(std::span<const Label> labels,
                           std::span<const Timestamp> timestamps);

}  // namespace loadseg
