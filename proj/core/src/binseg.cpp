#include "loadseg/binseg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "loadseg/errors.hpp"
#include "loadseg/stats.hpp"

namespace loadseg {

double l1_cost(std::span<const double> segment) {
  if (segment.empty()) return 0.0;
  const double m = median(segment);
  double c = 0.0;
  for (double x : segment) c += std::abs(x - m);
  return c;
}

std::vector<double> prefix_l1_costs(std::span<const double> x) {
  std::vector<double> costs(x.size() + 1, 0.0);
  std::priority_queue<double> low;
  std::priority_queue<double, std::vector<double>, std::greater<>> high;
  long double sum_low = 0, sum_high = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x[k];
    if (low.empty() || v <= low.top()) {
      low.push(v);
      sum_low += v;
    } else {
      high.push(v);
      sum_high += v;
    }
    if (low.size() > high.size() + 1) {
      const double t = low.top();
      low.pop();
      sum_low -= t;
      high.push(t);
      sum_high += t;
    } else if (high.size() > low.size()) {
      const double t = high.top();
      high.pop();
      sum_high -= t;
      low.push(t);
      sum_low += t;
    }
    const long double med = low.top();
    const long double c = med * static_cast<long double>(low.size()) - sum_low +
                          sum_high - med * static_cast<long double>(high.size());
    costs[k + 1] = static_cast<double>(std::max<long double>(c, 0));
  }
  return costs;
}

std::optional<SplitCandidate> best_split(std::span<const double> z,
                                         std::size_t start, std::size_t end,
                                         std::size_t min_size,
                                         std::size_t jump) {
  if (end <= start || end - start < 2 * min_size) return std::nullopt;
  const auto segment = z.subspan(start, end - start);
  const auto left = prefix_l1_costs(segment);
  std::vector<double> reversed(segment.rbegin(), segment.rend());
  const auto right_rev = prefix_l1_costs(reversed);
  const double total = left.back();
  const std::size_t len = segment.size();

  std::optional<SplitCandidate> best;
  // Candidates are absolute indices that are multiples of `jump`.
  std::size_t first = start + min_size;
  if (first % jump) first += jump - first % jump;
  for (std::size_t idx = first; idx + min_size <= end; idx += jump) {
    const std::size_t k = idx - start;
    const double gain = total - left[k] - right_rev[len - k];
    if (!best || gain > best->gain) best = SplitCandidate{idx, gain};
  }
  return best;
}

double split_penalty(std::span<const double> z, const BinsegParams& p) {
  const double t = static_cast<double>(z.size());
  if (p.penalty == PenaltyScaling::Linear) return p.beta * t;
  const double m = median(z);
  std::vector<double> dev(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dev[i] = std::abs(z[i] - m);
  return p.beta * t * median(dev);
}

std::vector<BinsegNode> binseg_tree(std::span<const double> z,
                                    std::size_t min_size, std::size_t jump,
                                    double min_penalty) {
  if (min_size < 1 || jump < 1)
    throw ConfigError("binary segmentation: min_size and jump must be >= 1");
  std::vector<BinsegNode> nodes;
  nodes.push_back({0, z.size(), std::nullopt, -1, -1});
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto k = stack.back();
    stack.pop_back();
    const auto cand =
        best_split(z, nodes[k].start, nodes[k].end, min_size, jump);
    if (!cand || !(cand->gain > min_penalty)) continue;
    nodes[k].split = cand;
    const auto left = static_cast<int>(nodes.size());
    nodes.push_back({nodes[k].start, cand->index, std::nullopt, -1, -1});
    nodes.push_back({cand->index, nodes[k].end, std::nullopt, -1, -1});
    nodes[k].left = left;
    nodes[k].right = left + 1;
    stack.push_back(static_cast<std::size_t>(left) + 1);
    stack.push_back(static_cast<std::size_t>(left));
  }
  return nodes;
}

std::vector<std::size_t> breakpoints_from_tree(
    std::span<const BinsegNode> tree, double penalty) {
  std::vector<std::size_t> bkps;
  if (tree.empty()) return bkps;
  bkps.push_back(tree[0].end);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto& nd = tree[stack.back()];
    stack.pop_back();
    if (!nd.split || !(nd.split->gain > penalty)) continue;
    bkps.push_back(nd.split->index);
    stack.push_back(static_cast<std::size_t>(nd.left));
    stack.push_back(static_cast<std::size_t>(nd.right));
  }
  std::sort(bkps.begin(), bkps.end());
  return bkps;
}

std::vector<std::size_t> binseg_breakpoints(std::span<const double> z,
                                            const BinsegParams& p) {
  if (z.empty()) return {0};
  const double pen = split_penalty(z, p);
  return breakpoints_from_tree(binseg_tree(z, p.min_size, p.jump, pen), pen);
}

double find_reference_value(std::span<const double> z,
                            std::span<const std::size_t> breakpoints,
                            ReferencePoint strategy) {
  switch (strategy) {
    case ReferencePoint::Mean:
      return mean(z);
    case ReferencePoint::Median:
      return median(z);
    case ReferencePoint::LongestMean:
    case ReferencePoint::LongestMedian: {
      std::size_t begin = 0, best_begin = 0, best_len = 0;
      for (auto end : breakpoints) {
        const auto len = end - begin;
        if (len > best_len) {
          best_len = len;
          best_begin = begin;
        }
        begin = end;
      }
      const auto seg = z.subspan(best_begin, best_len);
      return strategy == ReferencePoint::LongestMean ? mean(seg) : median(seg);
    }
  }
  return 0.0;
}

}  // namespace loadseg
