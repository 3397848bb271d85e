#include "loadseg/runs.hpp"

#include "loadseg/errors.hpp"

namespace loadseg {

namespace {

template <typename Adjacent>
std::vector<Run> runs_of(std::span<const Label> labels, Label target,
                         Adjacent adjacent) {
  std::vector<Run> runs;
  std::size_t i = 0;
  const std::size_t n = labels.size();
  while (i < n) {
    if (labels[i] != target) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && labels[j + 1] == target && adjacent(j)) ++j;
    const std::size_t len = j - i + 1;
    runs.push_back({i, j, len, category_for_length(len)});
    i = j + 1;
  }
  return runs;
}

CategorizedLabels categorize_runs(std::span<const Label> labels,
                                  const std::vector<Run>& runs) {
  CategorizedLabels out;
  out.labels.assign(labels.begin(), labels.end());
  out.categories.assign(labels.size(), LengthCategory::C1);
  for (const auto& run : runs)
    for (std::size_t i = run.start; i <= run.end; ++i)
      out.categories[i] = run.category;
  return out;
}

CategoryTally tally_runs(const std::vector<Run>& runs) {
  CategoryTally t;
  for (const auto& run : runs) {
    ++t.events[index_of(run.category)];
    t.samples[index_of(run.category)] += run.length;
  }
  return t;
}

void check_lengths(std::span<const Label> labels,
                   std::span<const Timestamp> timestamps) {
  if (labels.size() != timestamps.size())
    throw DataError("labels and timestamps differ in length");
}

}  // namespace

std::vector<Run> event_runs(std::span<const Label> labels, Label target) {
  return runs_of(labels, target, [](std::size_t) { return true; });
}

std::vector<Run> event_runs(std::span<const Label> labels, Label target,
                            std::span<const Timestamp> timestamps) {
  check_lengths(labels, timestamps);
  return runs_of(labels, target, [&](std::size_t j) {
    return timestamps[j + 1].epoch_seconds - timestamps[j].epoch_seconds <=
           kSampleIntervalSeconds;
  });
}

CategorizedLabels categorize(std::span<const Label> labels) {
  return categorize_runs(labels, event_runs(labels, Label::Event));
}

CategorizedLabels categorize(std::span<const Label> labels,
                             std::span<const Timestamp> timestamps) {
  return categorize_runs(labels,
                         event_runs(labels, Label::Event, timestamps));
}

CategorizedLabels categorize(const DifferenceSeries& series) {
  return categorize(series.labels, series.timestamps);
}

CategorizedLabels CategorizedLabels::subset(
    std::span<const std::size_t> indices) const {
  CategorizedLabels out;
  out.labels.reserve(indices.size());
  out.categories.reserve(indices.size());
  for (auto i : indices) {
    out.labels.push_back(labels[i]);
    out.categories.push_back(categories[i]);
  }
  return out;
}

CategoryTally& CategoryTally::operator+=(const CategoryTally& o) {
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    events[c] += o.events[c];
    samples[c] += o.samples[c];
  }
  return *this;
}

CategoryTally tally_events(std::span<const Label> labels) {
  return tally_runs(event_runs(labels, Label::Event));
}

CategoryTally tally_events(std::span<const Label> labels,
                           std::span<const Timestamp> timestamps) {
  return tally_runs(event_runs(labels, Label::Event, timestamps));
}

}  // namespace loadseg
