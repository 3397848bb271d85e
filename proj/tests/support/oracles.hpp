#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "loadseg/binseg.hpp"
#include "loadseg/runs.hpp"

namespace loadseg::test {

// Reference implementations that share no code with the library beyond
// plain data types.

inline double f_beta_oracle(double p, double r, double b = 1.5) {
  return (1 + b * b) * p * r / (b * b * p + r);
}

inline double median_oracle(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const auto n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline double l1_oracle(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = median_oracle({x.begin(), x.end()});
  double s = 0.0;
  for (double v : x) s += std::abs(v - m);
  return s;
}

// Every admissible split of z[start, end) evaluated from scratch.
inline std::optional<SplitCandidate> split_oracle(std::span<const double> z,
                                                  std::size_t start, std::size_t end,
                                                  std::size_t l, std::size_t j) {
  std::optional<SplitCandidate> best;
  const double total = l1_oracle(z.subspan(start, end - start));
  for (std::size_t k = start + 1; k < end; ++k) {
    if (k % j != 0 || k - start < l || end - k < l) continue;
    const double g = total - l1_oracle(z.subspan(start, k - start)) -
                     l1_oracle(z.subspan(k, end - k));
    if (!best || g > best->gain) best = SplitCandidate{k, g};
  }
  return best;
}

// P(pos > neg) + 0.5 P(pos == neg) over all pairs.
inline double auc_oracle(std::span<const double> pos, std::span<const double> neg) {
  double s = 0.0;
  for (double p : pos)
    for (double n : neg) s += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return s / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Average F-beta over categories with positives, counting normal samples as
// negatives for every category and ignoring uncertain samples.
inline double average_f_oracle(std::span<const std::vector<double>> scores,
                               std::span<const CategorizedLabels> labels,
                               const std::function<bool(double)>& flag,
                               double beta = 1.5) {
  std::array<double, 4> tp{}, fn{};
  double fp = 0;
  for (std::size_t s = 0; s < scores.size(); ++s) {
    for (std::size_t i = 0; i < scores[s].size(); ++i) {
      const bool p = flag(scores[s][i]);
      const auto lab = labels[s].labels[i];
      if (lab == Label::Normal) fp += p;
      if (lab == Label::Event) {
        const auto c = static_cast<std::size_t>(labels[s].categories[i]);
        (p ? tp[c] : fn[c]) += 1;
      }
    }
  }
  double sum = 0;
  int n = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (tp[c] + fn[c] == 0) continue;
    const double prec = tp[c] + fp > 0 ? tp[c] / (tp[c] + fp) : 0.0;
    const double rec = tp[c] / (tp[c] + fn[c]);
    sum += prec + rec > 0 ? f_beta_oracle(prec, rec, beta) : 0.0;
    ++n;
  }
  return sum / n;
}

}  // namespace loadseg::test
