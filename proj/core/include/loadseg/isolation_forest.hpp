#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace loadseg {

// Expected path length of an unsuccessful BST search over n points:
// 2 H(n-1) - 2 (n-1) / n with H(k) ~ ln(k) + 0.5772..., c(2) = 1 and
// c(n <= 1) = 0.
double average_path_length(std::size_t n);

// One isolation tree over 1-D values. Nodes are stored flat; a node with
// left < 0 is a leaf holding `size` training points.
struct IsolationTree {
  struct Node {
    double split = 0.0;  // x < split goes left
    int left = -1;
    int right = -1;
    int size = 0;
    int depth = 0;
  };
  std::vector<Node> nodes;

  // depth(leaf) + c(leaf size) for the leaf that x falls into.
  double path_length(double x) const;
  int height() const;
};

// Isolation forest on one-dimensional data. Each tree draws a subsample of
// psi = min(max_samples, n) points without replacement, splits uniformly
// between the node minimum and maximum and stops at depth ceil(log2 psi).
//
// In one dimension every tree is a step function of x, so after fitting the
// forest is compiled into a single sorted table of split values and the
// mean path length on each interval between them. Scoring is a binary
// search.
class IsolationForest {
 public:
  static IsolationForest fit(std::span<const double> data, int n_estimators,
                             int max_samples, std::uint64_t seed);

  // Rebuilds a forest from its compiled form (no trees retained).
  static IsolationForest from_table(std::size_t subsample_size,
                                    std::vector<double> breaks,
                                    std::vector<double> mean_path);

  // Mean path length over trees, from the compiled table.
  double mean_path_length(double x) const;
  // Same quantity by walking every tree; requires trees to be retained.
  double mean_path_length_by_traversal(double x) const;

  // 2^(-E[h(x)] / c(psi)), in (0, 1]; larger is more anomalous.
  double anomaly_score(double x) const;
  std::vector<double> anomaly_scores(std::span<const double> xs) const;

  std::size_t subsample_size() const { return psi_; }
  const std::vector<IsolationTree>& trees() const { return trees_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& mean_path() const { return mean_path_; }

 private:
  void compile();

  std::size_t psi_ = 0;
  std::vector<IsolationTree> trees_;
  std::vector<double> breaks_;     // sorted unique split values
  std::vector<double> mean_path_;  // breaks_.size() + 1 intervals
};

}  // namespace loadseg
