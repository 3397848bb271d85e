#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadseg/ensembles.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

using QuantilePair = std::pair<double, double>;

// Hyperparameter space per detector. Expanded as a cartesian product in the
// order the fields are declared; the expansion order fixes tie-breaking
// during selection.
struct SpcGrid {
  std::vector<QuantilePair> quantiles{{10, 90}, {15, 85}, {20, 80}};
  std::vector<ThresholdStrategy> threshold_strategies{
      ThresholdStrategy::Symmetrical, ThresholdStrategy::Asymmetrical};
};

struct IfGrid {
  std::vector<int> n_estimators{1000};
  int max_samples = 256;
  bool per_station = true;
  // One pooled configuration per quantile pair; empty disables pooling.
  std::vector<QuantilePair> pooled_quantiles{{10, 90}, {15, 85}, {20, 80}};
};

struct BinsegGrid {
  std::vector<double> beta{0.005, 0.008, 0.015, 0.05, 0.08, 0.12};
  std::vector<std::size_t> min_size{150, 200, 288};
  std::vector<std::size_t> jump{5, 10};
  std::vector<QuantilePair> quantiles{{10, 90}, {15, 85}, {20, 80}};
  std::vector<PenaltyScaling> penalty{PenaltyScaling::Linear};
  std::vector<ReferencePoint> reference_points{
      ReferencePoint::Mean, ReferencePoint::Median,
      ReferencePoint::LongestMedian, ReferencePoint::LongestMean};
  std::vector<ThresholdStrategy> threshold_strategies{
      ThresholdStrategy::Symmetrical, ThresholdStrategy::Asymmetrical};
};

struct GridSpec {
  SpcGrid spc;
  IfGrid isolation_forest;
  BinsegGrid binseg;
  // Ensemble components default to the single-detector grids; these
  // override them when set.
  std::optional<BinsegGrid> ensemble_binseg;
  std::optional<SpcGrid> ensemble_spc;
  std::optional<IfGrid> ensemble_isolation_forest;
};

std::vector<SpcConfig> expand(const SpcGrid& g);
std::vector<IfConfig> expand(const IfGrid& g);
std::vector<BinsegConfig> expand(const BinsegGrid& g);

// Method families compared by the pipeline.
enum class MethodFamily : std::uint8_t {
  Spc,
  IsolationForest,
  Binseg,
  NaiveBsSpc,
  NaiveBsIf,
  DocBsSpc,
  DocBsIf,
  SequentialBsSpc,
  SequentialBsIf
};

inline constexpr MethodFamily kAllMethodFamilies[] = {
    MethodFamily::Spc,        MethodFamily::IsolationForest,
    MethodFamily::Binseg,     MethodFamily::NaiveBsSpc,
    MethodFamily::NaiveBsIf,  MethodFamily::DocBsSpc,
    MethodFamily::DocBsIf,    MethodFamily::SequentialBsSpc,
    MethodFamily::SequentialBsIf};

// Identifiers such as "spc", "bs", "sequential_bs_spc".
std::string_view to_string(MethodFamily m);
MethodFamily method_family_from_string(std::string_view s);

std::optional<EnsembleStrategy> ensemble_of(MethodFamily m);
bool uses_isolation_forest(MethodFamily m);

// One point of a family's search space.
struct Candidate {
  MethodFamily family = MethodFamily::Spc;
  DetectorConfig single = SpcConfig{};
  std::optional<EnsembleConfig> ensemble;

  nlohmann::json to_json() const;
};

std::vector<Candidate> candidates(MethodFamily m, const GridSpec& grid);

nlohmann::json to_json(const GridSpec& g);
GridSpec grid_spec_from_json(const nlohmann::json& j);

}  // namespace loadseg
