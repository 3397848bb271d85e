#include "loadseg/ensembles.hpp"

#include <cmath>
#include <limits>

#include "loadseg/errors.hpp"
#include "loadseg/log.hpp"
#include "loadseg/parallel.hpp"
#include "loadseg/random.hpp"

namespace loadseg {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<ScoreSeries> score_all(const Scorer& scorer,
                                   std::span<const DifferenceSeries> series,
                                   std::size_t jobs) {
  std::vector<ScoreSeries> out(series.size());
  parallel_for(series.size(), jobs,
               [&](std::size_t k) { out[k] = score(scorer, series[k]); });
  return out;
}

// Thresholds that never fire, for a second stage with nothing to learn from.
ThresholdSet silent_thresholds(const DetectorConfig& config) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (threshold_strategy_of(config) == ThresholdStrategy::Asymmetrical)
    return AsymmetricThreshold{-inf, inf};
  return SymmetricThreshold{inf};
}

void check_aligned(std::span<const DifferenceSeries> series,
                   std::span<const CategorizedLabels> labels) {
  if (series.size() != labels.size())
    throw DataError("series and labels differ in station count");
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series[k].size() != labels[k].size())
      throw DataError("station '" + series[k].station_id +
                      "': series and labels differ in length");
}

}  // namespace

Scorer make_scorer(const DetectorConfig& config,
                   std::span<const DifferenceSeries> training,
                   std::uint64_t seed) {
  validate(config);
  Scorer s{config, std::nullopt, seed};
  if (const auto* f = std::get_if<IfConfig>(&config); f && f->pooled)
    s.pooled_forest = fit_pooled_forest(training, *f, seed);
  return s;
}

ScoreSeries score(const Scorer& scorer, const DifferenceSeries& series) {
  if (series.size() == 0)
    throw DataError("station '" + series.station_id + "': empty series");
  if (const auto* spc = std::get_if<SpcConfig>(&scorer.config))
    return spc_score(series, *spc);
  if (const auto* bs = std::get_if<BinsegConfig>(&scorer.config))
    return binseg_score(series, *bs).scores;
  const auto& f = std::get<IfConfig>(scorer.config);
  if (f.pooled) {
    if (!scorer.pooled_forest)
      throw ConfigError("pooled isolation forest used before fitting");
    return score_with_pooled_forest(*scorer.pooled_forest, series);
  }
  return if_score_per_station(series, f,
                              mix_seed(scorer.seed, fnv1a(series.station_id)));
}

DetectorModel train_detector(const DetectorConfig& config,
                             std::span<const DifferenceSeries> training,
                             std::span<const CategorizedLabels> labels,
                             CategorySet objective, std::uint64_t seed,
                             double beta, std::size_t jobs) {
  check_aligned(training, labels);
  DetectorModel m;
  m.scorer = make_scorer(config, training, seed);
  const auto scores = score_all(m.scorer, training, jobs);
  OptimizeOptions opt;
  opt.strategy = threshold_strategy_of(config);
  opt.objective = objective;
  opt.beta = beta;
  opt.jobs = jobs;
  const auto r = optimize_thresholds(scores, labels, opt);
  m.thresholds = r.threshold_set;
  m.objective = objective;
  m.achieved = r.achieved;
  m.candidate_count = r.candidate_count;
  m.capped = r.capped;
  return m;
}

PredictionSeries ensemble_naive(const PredictionSeries& a,
                                const PredictionSeries& b) {
  if (a.size() != b.size())
    throw DataError("ensemble of predictions with lengths " +
                    std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  PredictionSeries out{a.station_id, a.predictions};
  for (std::size_t i = 0; i < out.size(); ++i)
    out.predictions[i] = (a.predictions[i] | b.predictions[i]) ? 1 : 0;
  return out;
}

std::string_view to_string(EnsembleStrategy s) {
  switch (s) {
    case EnsembleStrategy::Naive:
      return "naive";
    case EnsembleStrategy::Doc:
      return "doc";
    case EnsembleStrategy::Sequential:
      return "sequential";
  }
  return "?";
}

EnsembleStrategy ensemble_strategy_from_string(std::string_view s) {
  for (auto e : {EnsembleStrategy::Naive, EnsembleStrategy::Doc,
                 EnsembleStrategy::Sequential})
    if (to_string(e) == s) return e;
  throw ConfigError("unknown ensemble strategy '" + std::string(s) + "'");
}

DetectorConfig to_detector_config(const ShortDetectorConfig& c) {
  return std::visit([](const auto& v) -> DetectorConfig { return v; }, c);
}

void EnsembleConfig::validate() const {
  loadseg::validate(long_detector);
  loadseg::validate(to_detector_config(short_detector));
  if (long_categories.empty() || short_categories.empty())
    throw ConfigError("ensemble: empty category set");
  if (long_categories.bits() & short_categories.bits())
    throw ConfigError("ensemble: long and short categories overlap");
  if ((long_categories.bits() | short_categories.bits()) !=
      CategorySet::all().bits())
    throw ConfigError("ensemble: categories must cover C1..C4");
}

MethodModel train_single(const DetectorConfig& config,
                         std::span<const DifferenceSeries> training,
                         std::span<const CategorizedLabels> labels,
                         std::uint64_t seed, double beta, std::size_t jobs) {
  MethodModel m;
  m.primary = train_detector(config, training, labels, CategorySet::all(),
                             seed, beta, jobs);
  return m;
}

DifferenceSeries residual_series(const DifferenceSeries& series,
                                 const PredictionSeries& stage_one,
                                 std::vector<std::size_t>& indices) {
  if (stage_one.size() != series.size())
    throw DataError("station '" + series.station_id +
                    "': stage-one predictions differ in length");
  indices.clear();
  DifferenceSeries out;
  out.station_id = series.station_id;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (stage_one.predictions[i]) continue;
    indices.push_back(i);
    out.timestamps.push_back(series.timestamps[i]);
    out.delta.push_back(series.delta[i]);
    out.labels.push_back(series.labels[i]);
    out.s_signed.push_back(series.s_signed[i]);
  }
  return out;
}

MethodModel train_ensemble(const EnsembleConfig& config,
                           std::span<const DifferenceSeries> training,
                           std::span<const CategorizedLabels> labels,
                           std::uint64_t seed, double beta, std::size_t jobs) {
  config.validate();
  check_aligned(training, labels);
  const DetectorConfig long_cfg = config.long_detector;
  const DetectorConfig short_cfg = to_detector_config(config.short_detector);

  MethodModel m;
  m.ensemble = config.strategy;
  if (config.strategy == EnsembleStrategy::Naive) {
    m.primary = train_detector(long_cfg, training, labels, CategorySet::all(),
                               seed, beta, jobs);
    m.secondary = train_detector(short_cfg, training, labels,
                                 CategorySet::all(), seed, beta, jobs);
    return m;
  }
  m.primary = train_detector(long_cfg, training, labels,
                             config.long_categories, seed, beta, jobs);
  if (config.strategy == EnsembleStrategy::Doc) {
    m.secondary = train_detector(short_cfg, training, labels,
                                 config.short_categories, seed, beta, jobs);
    return m;
  }

  std::vector<PredictionSeries> stage_one;
  stage_one.reserve(training.size());
  for (const auto& s : training)
    stage_one.push_back(apply_thresholds(score(m.primary.scorer, s),
                                         m.primary.thresholds));
  m.secondary =
      train_second_stage(short_cfg, build_residuals(training, labels, stage_one),
                         config.short_categories, seed, beta, jobs);
  return m;
}

ResidualSet build_residuals(std::span<const DifferenceSeries> series,
                            std::span<const CategorizedLabels> labels,
                            std::span<const PredictionSeries> stage_one) {
  check_aligned(series, labels);
  if (stage_one.size() != series.size())
    throw DataError("stage-one predictions differ in station count");
  ResidualSet out;
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::vector<std::size_t> idx;
    auto r = residual_series(series[k], stage_one[k], idx);
    if (r.size() == 0) {
      warn("sequential ensemble: station '" + series[k].station_id +
           "' fully flagged by the long detector; second stage skipped");
      continue;
    }
    out.series.push_back(std::move(r));
    out.labels.push_back(labels[k].subset(idx));
  }
  return out;
}

DetectorModel train_second_stage(const DetectorConfig& config,
                                 const ResidualSet& residuals,
                                 CategorySet objective, std::uint64_t seed,
                                 double beta, std::size_t jobs) {
  if (residuals.series.empty()) {
    warn("sequential ensemble: no residual samples; second stage disabled");
    DetectorModel silent;
    silent.scorer = Scorer{config, std::nullopt, seed};
    silent.thresholds = silent_thresholds(config);
    silent.objective = objective;
    return silent;
  }
  return train_detector(config, residuals.series, residuals.labels, objective,
                        seed, beta, jobs);
}

MethodOutput apply_method(const MethodModel& model,
                          const DifferenceSeries& series) {
  MethodOutput out;
  out.primary_scores = score(model.primary.scorer, series);
  out.primary_predictions =
      apply_thresholds(out.primary_scores, model.primary.thresholds);
  if (!model.ensemble) {
    out.predictions = out.primary_predictions;
    return out;
  }
  if (!model.secondary) throw ConfigError("ensemble without second detector");
  const auto& second = *model.secondary;

  if (*model.ensemble != EnsembleStrategy::Sequential) {
    out.secondary_scores = score(second.scorer, series);
    out.secondary_predictions =
        apply_thresholds(*out.secondary_scores, second.thresholds);
    out.predictions =
        ensemble_naive(out.primary_predictions, *out.secondary_predictions);
    return out;
  }

  const auto n = series.size();
  ScoreSeries mapped{series.station_id,
                     std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()),
                     polarity_of(second.scorer.config)};
  PredictionSeries mapped_pred{series.station_id,
                               std::vector<std::uint8_t>(n, 0)};
  auto residual =
      residual_series(series, out.primary_predictions, out.residual_indices);
  const auto* f = std::get_if<IfConfig>(&second.scorer.config);
  const bool disabled = f && f->pooled && !second.scorer.pooled_forest;
  if (disabled) {
    // Second stage trained without any residual samples.
  } else if (residual.size() == 0) {
    warn("sequential ensemble: station '" + series.station_id +
         "' fully flagged by the long detector; second stage skipped");
  } else {
    const auto s = score(second.scorer, residual);
    const auto p = apply_thresholds(s, second.thresholds);
    for (std::size_t k = 0; k < out.residual_indices.size(); ++k) {
      mapped.scores[out.residual_indices[k]] = s.scores[k];
      mapped_pred.predictions[out.residual_indices[k]] = p.predictions[k];
    }
  }
  out.secondary_scores = std::move(mapped);
  out.secondary_predictions = mapped_pred;
  out.predictions = ensemble_naive(out.primary_predictions, mapped_pred);
  return out;
}

namespace {

EnsembleRun run_ensemble(std::span<const DifferenceSeries> series,
                         std::span<const CategorizedLabels> labels,
                         EnsembleConfig config, EnsembleStrategy strategy,
                         std::uint64_t seed, double beta) {
  config.strategy = strategy;
  EnsembleRun run;
  run.model = train_ensemble(config, series, labels, seed, beta);
  run.outputs.reserve(series.size());
  for (const auto& s : series) run.outputs.push_back(apply_method(run.model, s));
  return run;
}

}  // namespace

EnsembleRun ensemble_doc(std::span<const DifferenceSeries> series,
                         std::span<const CategorizedLabels> labels,
                         const EnsembleConfig& config, std::uint64_t seed,
                         double beta) {
  return run_ensemble(series, labels, config, EnsembleStrategy::Doc, seed,
                      beta);
}

EnsembleRun ensemble_sequential(std::span<const DifferenceSeries> series,
                                std::span<const CategorizedLabels> labels,
                                const EnsembleConfig& config,
                                std::uint64_t seed, double beta) {
  return run_ensemble(series, labels, config, EnsembleStrategy::Sequential,
                      seed, beta);
}

}  // namespace loadseg
