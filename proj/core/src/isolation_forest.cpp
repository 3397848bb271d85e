#include "loadseg/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loadseg/errors.hpp"
#include "loadseg/random.hpp"

namespace loadseg {

double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  const double harmonic = std::log(m) + std::numbers::egamma;
  return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

double IsolationTree::path_length(double x) const {
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].left >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(k)];
    k = x < nd.split ? nd.left : nd.right;
  }
  const auto& leaf = nodes[static_cast<std::size_t>(k)];
  return leaf.depth + average_path_length(static_cast<std::size_t>(leaf.size));
}

int IsolationTree::height() const {
  int h = 0;
  for (const auto& nd : nodes) h = std::max(h, nd.depth);
  return h;
}

namespace {

int build_node(IsolationTree& tree, std::span<double> vals, int depth,
               int limit, Rng& rng) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({0.0, -1, -1, static_cast<int>(vals.size()), depth});
  if (depth >= limit || vals.size() <= 1) return id;
  const auto [mn_it, mx_it] = std::minmax_element(vals.begin(), vals.end());
  const double mn = *mn_it, mx = *mx_it;
  if (!(mn < mx)) return id;

  double split = mx;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double candidate = mn + rng.uniform() * (mx - mn);
    if (candidate > mn) {
      split = candidate;
      break;
    }
  }
  const auto mid = std::partition(vals.begin(), vals.end(),
                                  [split](double v) { return v < split; });
  const auto n_left = static_cast<std::size_t>(mid - vals.begin());
  const int left = build_node(tree, vals.first(n_left), depth + 1, limit, rng);
  const int right = build_node(tree, vals.subspan(n_left), depth + 1, limit, rng);
  auto& nd = tree.nodes[static_cast<std::size_t>(id)];
  nd.split = split;
  nd.left = left;
  nd.right = right;
  return id;
}

// psi distinct indices from [0, n) (Floyd's algorithm).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t psi,
                                        Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(psi);
  if (psi >= n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t j = n - psi; j < n; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(j);
  }
  return out;
}

}  // namespace

IsolationForest IsolationForest::fit(std::span<const double> data,
                                     int n_estimators, int max_samples,
                                     std::uint64_t seed) {
  if (n_estimators < 1)
    throw ConfigError("isolation forest: n_estimators must be >= 1");
  if (max_samples < 2)
    throw ConfigError("isolation forest: max_samples must be >= 2");
  if (data.size() < 2)
    throw DataError("isolation forest: need at least two samples");

  IsolationForest forest;
  forest.psi_ = std::min(static_cast<std::size_t>(max_samples), data.size());
  const int limit =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(forest.psi_))));
  forest.trees_.resize(static_cast<std::size_t>(n_estimators));
  std::vector<double> vals;
  for (int t = 0; t < n_estimators; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const auto idx = sample_indices(data.size(), forest.psi_, rng);
    vals.clear();
    for (auto i : idx) vals.push_back(data[i]);
    auto& tree = forest.trees_[static_cast<std::size_t>(t)];
    tree.nodes.reserve(2 * forest.psi_);
    build_node(tree, vals, 0, limit, rng);
  }
  forest.compile();
  return forest;
}

void IsolationForest::compile() {
  breaks_.clear();
  for (const auto& tree : trees_)
    for (const auto& nd : tree.nodes)
      if (nd.left >= 0) breaks_.push_back(nd.split);
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());

  // Interval k holds x with exactly k break values <= x. A leaf covering
  // [lo, hi) adds its path length to intervals [rank(lo), rank(hi)).
  const std::size_t intervals = breaks_.size() + 1;
  std::vector<long double> diff(intervals + 1, 0);
  auto rank = [&](double v) {
    return static_cast<std::size_t>(
               std::lower_bound(breaks_.begin(), breaks_.end(), v) -
               breaks_.begin()) +
           1;
  };
  struct Frame {
    int node;
    std::size_t lo, hi;
  };
  std::vector<Frame> stack;
  for (const auto& tree : trees_) {
    stack.push_back({0, 0, intervals});
    while (!stack.empty()) {
      const auto f = stack.back();
      stack.pop_back();
      const auto& nd = tree.nodes[static_cast<std::size_t>(f.node)];
      if (nd.left < 0) {
        if (f.lo < f.hi) {
          const long double h =
              nd.depth +
              average_path_length(static_cast<std::size_t>(nd.size));
          diff[f.lo] += h;
          diff[f.hi] -= h;
        }
        continue;
      }
      const std::size_t r = rank(nd.split);
      stack.push_back({nd.left, f.lo, std::min(f.hi, r)});
      stack.push_back({nd.right, std::max(f.lo, r), f.hi});
    }
  }
  mean_path_.assign(intervals, 0.0);
  long double acc = 0;
  const auto n_trees = static_cast<long double>(trees_.size());
  for (std::size_t k = 0; k < intervals; ++k) {
    acc += diff[k];
    mean_path_[k] = static_cast<double>(acc / n_trees);
  }
}

IsolationForest IsolationForest::from_table(std::size_t subsample_size,
                                            std::vector<double> breaks,
                                            std::vector<double> mean_path) {
  if (mean_path.size() != breaks.size() + 1 || subsample_size < 2 ||
      !std::is_sorted(breaks.begin(), breaks.end()))
    throw DataError("isolation forest: inconsistent compiled table");
  IsolationForest f;
  f.psi_ = subsample_size;
  f.breaks_ = std::move(breaks);
  f.mean_path_ = std::move(mean_path);
  return f;
}

double IsolationForest::mean_path_length(double x) const {
  const auto k = static_cast<std::size_t>(
      std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
  return mean_path_[k];
}

double IsolationForest::mean_path_length_by_traversal(double x) const {
  if (trees_.empty())
    throw Error("isolation forest: trees not retained in compiled form");
  long double acc = 0;
  for (const auto& t : trees_) acc += t.path_length(x);
  return static_cast<double>(acc / static_cast<long double>(trees_.size()));
}

double IsolationForest::anomaly_score(double x) const {
  return std::exp2(-mean_path_length(x) / average_path_length(psi_));
}

std::vector<double> IsolationForest::anomaly_scores(
    std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = anomaly_score(xs[i]);
  return out;
}

}  // namespace loadseg
