#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loadseg/detectors.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/thresholding.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

// ---------------------------------------------------------------------------
// Scoring with a fixed detector configuration

// Everything needed to score an unseen station. A pooled isolation forest
// is fitted once on the training stations; a per-station forest is fitted
// on each scored station with a seed derived from `seed` and the station id.
struct Scorer {
  DetectorConfig config;
  std::optional<PooledForest> pooled_forest;
  std::uint64_t seed = 0;
};

Scorer make_scorer(const DetectorConfig& config,
                   std::span<const DifferenceSeries> training,
                   std::uint64_t seed);

ScoreSeries score(const Scorer& scorer, const DifferenceSeries& series);

// A scorer plus the thresholds that turn its scores into predictions.
struct DetectorModel {
  Scorer scorer;
  ThresholdSet thresholds = SymmetricThreshold{};
  // Search metadata from training.
  CategorySet objective = CategorySet::all();
  double achieved = 0.0;
  std::size_t candidate_count = 0;
  bool capped = false;
};

// Scores every training station and optimizes thresholds on `objective`.
DetectorModel train_detector(const DetectorConfig& config,
                             std::span<const DifferenceSeries> training,
                             std::span<const CategorizedLabels> labels,
                             CategorySet objective, std::uint64_t seed,
                             double beta = kDefaultBeta, std::size_t jobs = 1);

// ---------------------------------------------------------------------------
// Ensembles

// Elementwise OR. Throws DataError on a length mismatch.
PredictionSeries ensemble_naive(const PredictionSeries& a,
                                const PredictionSeries& b);

enum class EnsembleStrategy : std::uint8_t { Naive, Doc, Sequential };

std::string_view to_string(EnsembleStrategy s);
EnsembleStrategy ensemble_strategy_from_string(std::string_view s);

using ShortDetectorConfig = std::variant<SpcConfig, IfConfig>;

DetectorConfig to_detector_config(const ShortDetectorConfig& c);

struct EnsembleConfig {
  EnsembleStrategy strategy = EnsembleStrategy::Sequential;
  BinsegConfig long_detector;
  ShortDetectorConfig short_detector = SpcConfig{};
  CategorySet long_categories = CategorySet::long_events();
  CategorySet short_categories = CategorySet::short_events();

  // Category sets must be disjoint and cover C1..C4.
  void validate() const;
};

// Either a single detector or a two-detector ensemble, trained.
struct MethodModel {
  std::optional<EnsembleStrategy> ensemble;
  // The only detector, or the long-event detector of an ensemble.
  DetectorModel primary;
  std::optional<DetectorModel> secondary;
};

struct MethodOutput {
  PredictionSeries predictions;
  ScoreSeries primary_scores;
  PredictionSeries primary_predictions;
  // Secondary detector output mapped to the full index range. For the
  // sequential ensemble, samples outside the residual carry NaN scores and
  // prediction 0.
  std::optional<ScoreSeries> secondary_scores;
  std::optional<PredictionSeries> secondary_predictions;
  // Sequential ensemble: indices scored by the second stage.
  std::vector<std::size_t> residual_indices;
};

MethodModel train_single(const DetectorConfig& config,
                         std::span<const DifferenceSeries> training,
                         std::span<const CategorizedLabels> labels,
                         std::uint64_t seed, double beta = kDefaultBeta,
                         std::size_t jobs = 1);

MethodModel train_ensemble(const EnsembleConfig& config,
                           std::span<const DifferenceSeries> training,
                           std::span<const CategorizedLabels> labels,
                           std::uint64_t seed, double beta = kDefaultBeta,
                           std::size_t jobs = 1);

MethodOutput apply_method(const MethodModel& model,
                          const DifferenceSeries& series);

// Samples whose stage-one prediction is 0, as a difference series of their
// own. Empty when stage one flags everything.
DifferenceSeries residual_series(const DifferenceSeries& series,
                                 const PredictionSeries& stage_one,
                                 std::vector<std::size_t>& indices);

// Stage-two training data of a sequential ensemble: the residual of every
// station with at least one sample left, and its labels (categories carried
// over from the full series).
struct ResidualSet {
  std::vector<DifferenceSeries> series;
  std::vector<CategorizedLabels> labels;
};

ResidualSet build_residuals(std::span<const DifferenceSeries> series,
                            std::span<const CategorizedLabels> labels,
                            std::span<const PredictionSeries> stage_one);

// Trains the short detector on a residual set; with no residual samples at
// all the returned model never fires.
DetectorModel train_second_stage(const DetectorConfig& config,
                                 const ResidualSet& residuals,
                                 CategorySet objective, std::uint64_t seed,
                                 double beta = kDefaultBeta,
                                 std::size_t jobs = 1);

// Train-and-apply on the same stations, for the spec-level entry points.
struct EnsembleRun {
  MethodModel model;
  std::vector<MethodOutput> outputs;
};

// Thresholds of the long detector optimized on the long categories and of
// the short detector on the short categories, both on the full series.
EnsembleRun ensemble_doc(std::span<const DifferenceSeries> series,
                         std::span<const CategorizedLabels> labels,
                         const EnsembleConfig& config, std::uint64_t seed,
                         double beta = kDefaultBeta);

// Long detector first; the short detector is rescaled, scored and
// thresholded on the residual only.
EnsembleRun ensemble_sequential(std::span<const DifferenceSeries> series,
                                std::span<const CategorizedLabels> labels,
                                const EnsembleConfig& config,
                                std::uint64_t seed,
                                double beta = kDefaultBeta);

}  // namespace loadseg
