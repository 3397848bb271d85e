#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loadseg/pipeline.hpp"

namespace loadseg::cli {

// Flag overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> split_file;
  std::optional<std::filesystem::path> model_file;
  std::optional<std::size_t> stations;
  std::optional<std::size_t> bootstrap_iterations;
  std::vector<std::string> methods;
};

RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const Overrides& o);

// Writes <output_dir>/resolved_config.<command>.json.
void write_snapshot(const RunConfig& c, const std::string& command);

int cmd_generate(const RunConfig& c);
int cmd_split(const RunConfig& c);
int cmd_preprocess(const RunConfig& c);
int cmd_optimize(const RunConfig& c);
int cmd_evaluate(const RunConfig& c);
int cmd_annotate(const RunConfig& c, const std::string& method,
                 const std::vector<std::filesystem::path>& files);
int cmd_estimate_loads(const RunConfig& c, const std::string& method);

}  // namespace loadseg::cli
