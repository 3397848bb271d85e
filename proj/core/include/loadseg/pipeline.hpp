#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadseg/bootstrap.hpp"
#include "loadseg/ensembles.hpp"
#include "loadseg/grid.hpp"
#include "loadseg/ingestion.hpp"
#include "loadseg/load_estimation.hpp"
#include "loadseg/metrics.hpp"
#include "loadseg/model_io.hpp"
#include "loadseg/preprocessing.hpp"
#include "loadseg/synthetic.hpp"

namespace loadseg {

struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path output_dir = "out";
  // Empty means <output_dir>/split.csv and <output_dir>/model.json.
  std::filesystem::path split_file;
  std::filesystem::path model_file;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t bootstrap_iterations = kDefaultBootstrapIterations;
  double beta = kDefaultBeta;
  double margin = 0.1;
  LoadOptions load;
  PreprocessConfig preprocess;
  FleetSpec generate;
  GridSpec grid;
  std::vector<MethodFamily> methods{std::begin(kAllMethodFamilies),
                                    std::end(kAllMethodFamilies)};

  std::filesystem::path resolved_split_file() const;
  std::filesystem::path resolved_model_file() const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Data preparation

struct PreparedStation {
  DifferenceSeries series;
  CategorizedLabels labels;
  FitResult fit;
  bool sign_corrected = false;
  std::size_t removed_count = 0;
};

PreparedStation prepare_station(const StationSeries& station,
                                const PreprocessConfig& cfg);
std::vector<PreparedStation> prepare_stations(
    std::span<const StationSeries> stations, const PreprocessConfig& cfg,
    std::size_t jobs = 1);

struct SplitData {
  std::vector<PreparedStation> train;
  std::vector<PreparedStation> validation;
  std::vector<PreparedStation> test;
};

// Assigns prepared stations to splits. Throws DataError when a station has
// no assignment or an assigned station is missing.
SplitData split_stations(std::vector<PreparedStation> stations,
                         const SplitAssignment& split);

std::vector<DifferenceSeries> series_of(std::span<const PreparedStation> s);
std::vector<CategorizedLabels> labels_of(std::span<const PreparedStation> s);

// ---------------------------------------------------------------------------
// Model selection

struct CandidateScore {
  std::size_t index = 0;
  double validation_f_beta = 0.0;
  // Set when training or evaluating the candidate failed.
  std::optional<std::string> error;
};

struct FamilySelection {
  MethodFamily family = MethodFamily::Spc;
  Candidate chosen;
  std::size_t chosen_index = 0;
  MethodModel model;
  DatasetMetrics validation;
  std::vector<CandidateScore> scores;
};

// Trains every grid candidate of each family on `train`, scores it on
// `validation` and keeps the best average F-beta per family (ties go to the
// earliest candidate in grid order). The selected candidate is retrained
// from scratch and re-evaluated; its metrics are the ones reported.
std::vector<FamilySelection> select_models(
    std::span<const PreparedStation> train,
    std::span<const PreparedStation> validation, const RunConfig& config);

ModelFile to_model_file(std::span<const FamilySelection> selections,
                        const RunConfig& config);

// ---------------------------------------------------------------------------
// Evaluation

struct LoadComparison {
  std::vector<LoadEstimate> truth;
  std::vector<LoadEstimate> predicted;
  std::vector<LoadEstimate> unfiltered;
  EstimateErrorTable predicted_errors;
  EstimateErrorTable unfiltered_errors;
  // Stations left out because the prediction removed every sample.
  std::vector<std::string> fully_filtered;
};

LoadComparison compare_load_estimates(
    std::span<const PreparedStation> stations,
    std::span<const PredictionSeries> predictions, double margin = 0.1);

struct MethodEvaluation {
  std::string name;
  MethodModel model;
  std::vector<MethodOutput> outputs;
  DatasetMetrics metrics;
  MetricsBootstrap bootstrap;
  // Single detectors only.
  std::optional<CategoryAuc> auc;
  LoadComparison loads;
};

std::vector<MethodEvaluation> evaluate_models(
    const ModelFile& models, std::span<const PreparedStation> stations,
    const RunConfig& config);

nlohmann::json evaluation_report(std::span<const MethodEvaluation> evals,
                                 std::span<const PreparedStation> stations,
                                 const RunConfig& config);
// method,category,metric,mean,std
std::string plot_data_csv(std::span<const MethodEvaluation> evals);
// method,category,auc
std::string auc_csv(std::span<const MethodEvaluation> evals);
// station_id,source,max_load,min_load
std::string estimates_csv(const LoadComparison& loads);
// station_id,truth,predicted,bound
std::string scatter_csv(const LoadComparison& loads);

// timestamp,delta,s_signed,label
std::string difference_csv(const DifferenceSeries& series);
DifferenceSeries parse_difference_csv(std::string_view text,
                                      std::string station_id);

}  // namespace loadseg
