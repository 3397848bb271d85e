#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loadseg/ensembles.hpp"
#include "loadseg/types.hpp"

namespace loadseg {

// JSON forms of configurations and trained models. Infinite thresholds are
// written as the strings "inf" and "-inf". Readers throw ConfigError on
// unknown keys, wrong types or invalid values.

nlohmann::json to_json(const DetectorConfig& c);
DetectorConfig detector_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ThresholdSet& t);
ThresholdSet threshold_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PooledForest& f);
PooledForest pooled_forest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DetectorModel& m);
DetectorModel detector_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MethodModel& m);
MethodModel method_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnsembleConfig& c);
EnsembleConfig ensemble_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DatasetMetrics& m);

// A model file: named, trained methods plus free-form provenance.
struct NamedModel {
  std::string name;
  MethodModel model;
  nlohmann::json provenance = nlohmann::json::object();
};

struct ModelFile {
  double beta = 1.5;
  std::vector<NamedModel> methods;
};

nlohmann::json to_json(const ModelFile& f);
ModelFile model_file_from_json(const nlohmann::json& j);

void save_model_file(const std::filesystem::path& path, const ModelFile& f);
ModelFile load_model_file(const std::filesystem::path& path);

// Reads a JSON document, mapping parse failures to ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);

// Number or "inf"/"-inf".
nlohmann::json json_number(double v);
double number_from_json(const nlohmann::json& j);

}  // namespace loadseg
