#include "loadseg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "loadseg/errors.hpp"

namespace loadseg {

__extension__ using u128 = unsigned __int128;

Confusion category_confusion(const CategorizedLabels& labels,
                             std::span<const std::uint8_t> predictions,
                             LengthCategory category) {
  if (labels.size() != predictions.size())
    throw DataError("labels and predictions differ in length");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] != 0;
    switch (labels.labels[i]) {
      case Label::Normal:
        if (predicted) ++c.fp;
        break;
      case Label::Event:
        if (labels.categories[i] != category) break;
        if (predicted)
          ++c.tp;
        else
          ++c.fn;
        break;
      case Label::Uncertain:
        break;
    }
  }
  return c;
}

Confusion category_confusion(std::span<const Label> labels,
                             std::span<const std::uint8_t> predictions,
                             LengthCategory category) {
  return category_confusion(categorize(labels), predictions, category);
}

ConfusionTable confusion_table(const CategorizedLabels& labels,
                               std::span<const std::uint8_t> predictions) {
  if (labels.size() != predictions.size())
    throw DataError("labels and predictions differ in length");
  ConfusionTable t{};
  std::size_t fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] != 0;
    if (labels.labels[i] == Label::Normal) {
      fp += predicted;
    } else if (labels.labels[i] == Label::Event) {
      auto& c = t[index_of(labels.categories[i])];
      if (predicted)
        ++c.tp;
      else
        ++c.fn;
    }
  }
  for (auto& c : t) c.fp = fp;
  return t;
}

ConfusionTable& operator+=(ConfusionTable& a, const ConfusionTable& b) {
  for (std::size_t c = 0; c < kNumCategories; ++c) a[c] += b[c];
  return a;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (!(precision + recall > 0.0) || !(denom > 0.0)) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

CategoryMetrics category_metrics(LengthCategory c, const Confusion& counts,
                                 double beta) {
  CategoryMetrics m;
  m.category = c;
  m.counts = counts;
  const auto tp = static_cast<double>(counts.tp);
  m.precision = counts.tp + counts.fp > 0
                    ? tp / static_cast<double>(counts.tp + counts.fp)
                    : 0.0;
  m.recall = counts.tp + counts.fn > 0
                 ? tp / static_cast<double>(counts.tp + counts.fn)
                 : 0.0;
  m.f_beta = f_beta(m.precision, m.recall, beta);
  m.has_positives = counts.tp + counts.fn > 0;
  return m;
}

DatasetMetrics metrics_from_table(const ConfusionTable& table, double beta,
                                  CategorySet objective) {
  DatasetMetrics out;
  double sum_f = 0.0, sum_p = 0.0, sum_r = 0.0;
  std::size_t n = 0;
  for (auto c : kAllCategories) {
    auto& m = out.categories[index_of(c)];
    m = category_metrics(c, table[index_of(c)], beta);
    if (m.has_positives && objective.contains(c)) {
      sum_f += m.f_beta;
      sum_p += m.precision;
      sum_r += m.recall;
      ++n;
      out.averaged.insert(c);
    }
  }
  if (n == 0)
    throw OptimizationError(
        "undefined recall: no event samples in any objective category");
  out.average_f_beta = sum_f / static_cast<double>(n);
  out.average_precision = sum_p / static_cast<double>(n);
  out.average_recall = sum_r / static_cast<double>(n);
  return out;
}

DatasetMetrics dataset_metrics(std::span<const CategorizedLabels> labels,
                               std::span<const PredictionSeries> predictions,
                               double beta, CategorySet objective) {
  if (labels.size() != predictions.size())
    throw DataError("dataset metrics: station counts differ");
  if (labels.empty()) throw DataError("dataset metrics: no stations");
  ConfusionTable total{};
  for (std::size_t k = 0; k < labels.size(); ++k)
    total += confusion_table(labels[k], predictions[k].predictions);
  return metrics_from_table(total, beta, objective);
}

std::optional<double> rank_auc(std::span<const double> positives,
                               std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) return std::nullopt;
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(positives.size() + negatives.size());
  for (double s : positives) items.push_back({s, true});
  for (double s : negatives) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sum of (doubled) average ranks of positives, kept in integers so the
  // statistic is exact.
  u128 doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j + 1 < items.size() && items[j + 1].score == items[i].score) ++j;
    // Ranks i+1 .. j+1; doubled average = i + j + 2.
    std::size_t pos = 0;
    for (std::size_t k = i; k <= j; ++k) pos += items[k].positive;
    doubled_rank_sum += static_cast<u128>(pos) * (i + j + 2);
    i = j + 1;
  }
  const auto np = static_cast<u128>(positives.size());
  const auto nn = static_cast<u128>(negatives.size());
  // U = R - np(np+1)/2 ; doubled: 2R - np(np+1)
  const u128 doubled_u = doubled_rank_sum - np * (np + 1);
  return static_cast<double>(static_cast<long double>(doubled_u) /
                             (2.0L * static_cast<long double>(np * nn)));
}

namespace {

void collect(const CategorizedLabels& labels, std::span<const double> scores,
             Polarity polarity,
             std::array<std::vector<double>, kNumCategories>& pos,
             std::vector<double>& neg) {
  if (labels.size() != scores.size())
    throw DataError("labels and scores differ in length");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double eff =
        polarity == Polarity::ZeroCentered ? std::abs(scores[i]) : scores[i];
    if (labels.labels[i] == Label::Normal)
      neg.push_back(eff);
    else if (labels.labels[i] == Label::Event)
      pos[index_of(labels.categories[i])].push_back(eff);
  }
}

}  // namespace

CategoryAuc category_auc(const CategorizedLabels& labels,
                         std::span<const double> scores, Polarity polarity) {
  std::array<std::vector<double>, kNumCategories> pos;
  std::vector<double> neg;
  collect(labels, scores, polarity, pos, neg);
  CategoryAuc out;
  for (std::size_t c = 0; c < kNumCategories; ++c) out[c] = rank_auc(pos[c], neg);
  return out;
}

CategoryAuc category_auc(std::span<const CategorizedLabels> labels,
                         std::span<const ScoreSeries> scores) {
  if (labels.size() != scores.size())
    throw DataError("AUC: station counts differ");
  std::array<std::vector<double>, kNumCategories> pos;
  std::vector<double> neg;
  for (std::size_t k = 0; k < labels.size(); ++k)
    collect(labels[k], scores[k].scores, scores[k].polarity, pos, neg);
  CategoryAuc out;
  for (std::size_t c = 0; c < kNumCategories; ++c) out[c] = rank_auc(pos[c], neg);
  return out;
}

}  // namespace loadseg
