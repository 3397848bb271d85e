#include "loadseg/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "loadseg/errors.hpp"
#include "loadseg/parallel.hpp"

namespace loadseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_scores(const ScoreSeries& scores) {
  for (double z : scores.scores)
    if (std::isnan(z))
      throw DataError("scores of station '" + scores.station_id +
                      "' contain NaN");
}

// Slot of a sample in the pooled counts: 0..3 an event of that category,
// 4 a normal sample, 5 ignored by every metric.
constexpr std::size_t kNegativeSlot = kNumCategories;
constexpr std::size_t kIgnoredSlot = kNumCategories + 1;
constexpr std::size_t kSlots = kNumCategories + 2;

struct Sample {
  double value;
  std::uint8_t slot;
};

using Counts = std::array<std::size_t, kSlots>;

Counts& operator+=(Counts& a, const Counts& b) {
  for (std::size_t k = 0; k < kSlots; ++k) a[k] += b[k];
  return a;
}

std::size_t flagged(const Counts& c) {
  return std::accumulate(c.begin(), c.end(), std::size_t{0});
}

ConfusionTable to_table(const Counts& predicted, const Counts& totals) {
  ConfusionTable t{};
  for (std::size_t k = 0; k < kNumCategories; ++k) {
    t[k].tp = predicted[k];
    t[k].fn = totals[k] - predicted[k];
    t[k].fp = predicted[kNegativeSlot];
  }
  return t;
}

std::vector<Sample> pool(std::span<const ScoreSeries> scores,
                         std::span<const CategorizedLabels> labels,
                         bool absolute) {
  if (scores.size() != labels.size())
    throw DataError("threshold optimization: " + std::to_string(scores.size()) +
                    " score series but " + std::to_string(labels.size()) +
                    " label series");
  std::vector<Sample> out;
  for (std::size_t s = 0; s < scores.size(); ++s) {
    check_scores(scores[s]);
    const auto& z = scores[s].scores;
    const auto& lab = labels[s];
    if (z.size() != lab.size())
      throw DataError("station '" + scores[s].station_id +
                      "': scores and labels differ in length");
    for (std::size_t i = 0; i < z.size(); ++i) {
      std::uint8_t slot = kIgnoredSlot;
      if (lab.labels[i] == Label::Normal)
        slot = kNegativeSlot;
      else if (lab.labels[i] == Label::Event)
        slot = static_cast<std::uint8_t>(index_of(lab.categories[i]));
      out.push_back({absolute ? std::abs(z[i]) : z[i], slot});
    }
  }
  return out;
}

// Sorted distinct values with the per-slot counts of each value.
struct Level {
  double value;
  Counts counts;
};

std::vector<Level> levels(std::vector<Sample>& samples) {
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.value < b.value; });
  std::vector<Level> out;
  for (const auto& s : samples) {
    if (out.empty() || out.back().value != s.value)
      out.push_back({s.value, Counts{}});
    ++out.back().counts[s.slot];
  }
  return out;
}

Counts totals_of(const std::vector<Level>& lv) {
  Counts t{};
  for (const auto& l : lv) t += l.counts;
  return t;
}

void require_positives(const Counts& totals, CategorySet objective) {
  for (auto c : kAllCategories)
    if (objective.contains(c) && totals[index_of(c)] > 0) return;
  throw OptimizationError(
      "undefined recall: no event samples in the objective categories");
}

// Evenly spaced picks (by rank) from `n` items, always keeping both ends.
std::vector<std::size_t> thin(std::size_t n, std::size_t cap, bool& capped) {
  std::vector<std::size_t> idx;
  if (n <= cap || cap < 2) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }
  capped = true;
  for (std::size_t k = 0; k < cap; ++k) {
    const auto i = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) /
                     static_cast<double>(cap - 1)));
    if (idx.empty() || idx.back() != i) idx.push_back(i);
  }
  return idx;
}

ThresholdOptimizationResult optimize_one_sided(std::vector<Sample> samples,
                                               const OptimizeOptions& opt) {
  const auto lv = levels(samples);
  const Counts totals = totals_of(lv);
  require_positives(totals, opt.objective);

  Counts predicted{};
  double best_f = metrics_from_table(to_table(predicted, totals), opt.beta,
                                     opt.objective)
                      .average_f_beta;
  double best_theta = kInf;
  for (auto it = lv.rbegin(); it != lv.rend(); ++it) {
    predicted += it->counts;
    const double f = metrics_from_table(to_table(predicted, totals), opt.beta,
                                        opt.objective)
                         .average_f_beta;
    if (f > best_f) {
      best_f = f;
      best_theta = it->value;
    }
  }

  ThresholdOptimizationResult r;
  r.threshold_set = SymmetricThreshold{best_theta};
  r.achieved = best_f;
  r.candidate_count = lv.size() + 1;
  r.objective = opt.objective;
  return r;
}

struct PairChoice {
  double f = -1.0;
  std::size_t flagged = 0;
  double lower = -kInf;
  double upper = kInf;
  Counts counts{};
  bool valid = false;
};

bool better(const PairChoice& a, const PairChoice& b) {
  if (!b.valid) return a.valid;
  if (a.f != b.f) return a.f > b.f;
  if (a.flagged != b.flagged) return a.flagged < b.flagged;
  return a.upper > b.upper;
}

ThresholdOptimizationResult optimize_two_sided(std::vector<Sample> samples,
                                               const OptimizeOptions& opt) {
  const auto lv = levels(samples);
  const Counts totals = totals_of(lv);
  require_positives(totals, opt.objective);

  // Lower bound L flags z < L. Candidate bounds are -inf (nothing), every
  // distinct negative value above the minimum, and 0 (all negatives).
  const auto first_nonneg = static_cast<std::size_t>(
      std::partition_point(lv.begin(), lv.end(),
                           [](const Level& l) { return l.value < 0.0; }) -
      lv.begin());
  // prefix[k] = counts of levels [0, k).
  std::vector<Counts> prefix(lv.size() + 1, Counts{});
  for (std::size_t k = 0; k < lv.size(); ++k) {
    prefix[k + 1] = prefix[k];
    prefix[k + 1] += lv[k].counts;
  }

  struct Bound {
    double value;
    Counts counts;
  };
  bool capped = false;
  std::vector<Bound> lower{{-kInf, Counts{}}};
  {
    // Distinct negative levels 1..first_nonneg-1 as bounds, then 0.
    const std::size_t m = first_nonneg > 1 ? first_nonneg - 1 : 0;
    for (auto k : thin(m, opt.max_side_candidates, capped))
      lower.push_back({lv[k + 1].value, prefix[k + 1]});
    if (first_nonneg > 0) lower.push_back({0.0, prefix[first_nonneg]});
  }
  // Upper bound U flags z >= U: every distinct non-negative level and +inf.
  std::vector<Bound> upper;
  {
    const std::size_t m = lv.size() - first_nonneg;
    for (auto k : thin(m, opt.max_side_candidates, capped)) {
      const std::size_t at = first_nonneg + k;
      Counts c = prefix[lv.size()];
      for (std::size_t s = 0; s < kSlots; ++s) c[s] -= prefix[at][s];
      upper.push_back({lv[at].value, c});
    }
    upper.push_back({kInf, Counts{}});
  }

  // Scan order: upper descending, lower ascending. Each upper bound is an
  // independent task; per-task winners are reduced in order.
  std::vector<PairChoice> per_upper(upper.size());
  std::vector<std::size_t> evaluated(upper.size(), 0);
  parallel_for(upper.size(), opt.jobs, [&](std::size_t t) {
    const auto& up = upper[upper.size() - 1 - t];
    PairChoice best;
    for (const auto& lo : lower) {
      if (!(lo.value < up.value)) continue;
      ++evaluated[t];
      Counts c = up.counts;
      c += lo.counts;
      PairChoice cand;
      cand.f = metrics_from_table(to_table(c, totals), opt.beta, opt.objective)
                   .average_f_beta;
      cand.flagged = flagged(c);
      cand.lower = lo.value;
      cand.upper = up.value;
      cand.counts = c;
      cand.valid = true;
      if (better(cand, best)) best = cand;
    }
    per_upper[t] = best;
  });
  PairChoice best;
  std::size_t count = 0;
  for (std::size_t t = 0; t < per_upper.size(); ++t) {
    count += evaluated[t];
    if (better(per_upper[t], best)) best = per_upper[t];
  }

  ThresholdOptimizationResult r;
  r.threshold_set = AsymmetricThreshold{best.lower, best.upper};
  r.achieved = best.f;
  r.candidate_count = count;
  r.objective = opt.objective;
  r.capped = capped;
  return r;
}

}  // namespace

PredictionSeries threshold_one_sided(const ScoreSeries& scores, double theta) {
  if (!(theta >= 0.0))
    throw ConfigError("one-sided threshold must be >= 0");
  PredictionSeries out{scores.station_id,
                       std::vector<std::uint8_t>(scores.size(), 0)};
  const bool absolute = scores.polarity == Polarity::ZeroCentered;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double e = absolute ? std::abs(scores.scores[i]) : scores.scores[i];
    out.predictions[i] = e >= theta ? 1 : 0;
  }
  return out;
}

PredictionSeries threshold_two_sided(const ScoreSeries& scores, double lower,
                                     double upper) {
  if (scores.polarity != Polarity::ZeroCentered)
    throw ConfigError(
        "two-sided thresholds require zero-centered scores (station '" +
        scores.station_id + "')");
  if (!(lower < upper))
    throw ConfigError("two-sided thresholds require lower < upper");
  PredictionSeries out{scores.station_id,
                       std::vector<std::uint8_t>(scores.size(), 0)};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = scores.scores[i];
    out.predictions[i] = (z >= upper || z < lower) ? 1 : 0;
  }
  return out;
}

PredictionSeries apply_thresholds(const ScoreSeries& scores,
                                  const ThresholdSet& thresholds) {
  if (const auto* s = std::get_if<SymmetricThreshold>(&thresholds))
    return threshold_one_sided(scores, s->theta);
  const auto& a = std::get<AsymmetricThreshold>(thresholds);
  return threshold_two_sided(scores, a.lower, a.upper);
}

DatasetMetrics evaluate_thresholds(std::span<const ScoreSeries> scores,
                                   std::span<const CategorizedLabels> labels,
                                   const ThresholdSet& thresholds, double beta,
                                   CategorySet objective) {
  std::vector<PredictionSeries> preds;
  preds.reserve(scores.size());
  for (const auto& s : scores) preds.push_back(apply_thresholds(s, thresholds));
  return dataset_metrics(labels, preds, beta, objective);
}

ThresholdOptimizationResult optimize_thresholds(
    std::span<const ScoreSeries> scores,
    std::span<const CategorizedLabels> labels, const OptimizeOptions& options) {
  if (options.objective.empty())
    throw ConfigError("threshold optimization: empty objective categories");
  if (scores.empty()) throw DataError("threshold optimization: no stations");
  const Polarity polarity = scores.front().polarity;
  for (const auto& s : scores)
    if (s.polarity != polarity)
      throw ConfigError("threshold optimization: mixed score polarities");

  ThresholdOptimizationResult r;
  if (options.strategy == ThresholdStrategy::Symmetrical) {
    r = optimize_one_sided(
        pool(scores, labels, polarity == Polarity::ZeroCentered), options);
  } else {
    if (polarity != Polarity::ZeroCentered)
      throw ConfigError(
          "asymmetrical thresholds require zero-centered scores");
    r = optimize_two_sided(pool(scores, labels, false), options);
  }
  r.metrics = evaluate_thresholds(scores, labels, r.threshold_set,
                                  options.beta, options.objective);
  return r;
}

}  // namespace loadseg
