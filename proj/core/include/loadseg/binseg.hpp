#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "loadseg/types.hpp"

namespace loadseg {

// L1 segment cost: sum of absolute deviations from the segment median.
double l1_cost(std::span<const double> segment);

// costs[k] = l1_cost(x[0..k)) for k = 0..x.size(), computed in a single
// O(n log n) pass with a two-heap running median.
std::vector<double> prefix_l1_costs(std::span<const double> x);

struct SplitCandidate {
  std::size_t index = 0;  // first sample of the right-hand segment
  double gain = 0.0;
};

// Best single split of z[start, end): admissible indices are multiples of
// `jump` leaving at least `min_size` samples on each side. Gain is
// cost(total) - cost(left) - cost(right); the lowest index wins ties.
std::optional<SplitCandidate> best_split(std::span<const double> z,
                                         std::size_t start, std::size_t end,
                                         std::size_t min_size,
                                         std::size_t jump);

struct BinsegParams {
  double beta = 0.008;
  std::size_t min_size = 200;
  std::size_t jump = 10;
  PenaltyScaling penalty = PenaltyScaling::Linear;
};

// Penalty a split's gain must exceed: beta * T (linear) or beta * T * MAD(z)
// (L1), with T the series length.
double split_penalty(std::span<const double> z, const BinsegParams& p);

// Segment end indices, exclusive (equivalently 1-based inclusive ends),
// strictly increasing, last element = z.size(). Segments are split
// recursively while their best gain exceeds the penalty.
std::vector<std::size_t> binseg_breakpoints(std::span<const double> z,
                                            const BinsegParams& p);

// Split tree of a segmentation: each node is a segment [start, end) and, if
// its best gain exceeded the penalty used to build the tree, the split.
// Because a segment's best split does not depend on the penalty, the tree
// built with penalty p yields the breakpoints of every penalty >= p.
struct BinsegNode {
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<SplitCandidate> split;
  int left = -1;
  int right = -1;
};

std::vector<BinsegNode> binseg_tree(std::span<const double> z,
                                    std::size_t min_size, std::size_t jump,
                                    double min_penalty);

// Breakpoints of the splits whose gain exceeds `penalty`, keeping a split only
// if all of its ancestors were kept.
std::vector<std::size_t> breakpoints_from_tree(
    std::span<const BinsegNode> tree, double penalty);

// Baseline for segment scores: mean/median of the whole series, or of the
// longest segment (first one wins ties).
double find_reference_value(std::span<const double> z,
                            std::span<const std::size_t> breakpoints,
                            ReferencePoint strategy);

}  // namespace loadseg
