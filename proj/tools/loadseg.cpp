#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "loadseg/errors.hpp"

namespace fs = std::filesystem;
using namespace loadseg;

int main(int argc, char** argv) {
  CLI::App app{"Load-profile event segmentation and load estimation"};
  app.require_subcommand(1);

  std::optional<fs::path> config;
  cli::Overrides o;
  app.add_option("--config", config, "JSON run config");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--jobs", o.jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", o.output_dir, "Output directory");
  app.add_option("--data-dir", o.data_dir, "Station CSV directory");
  app.add_option("--split-file", o.split_file, "Split assignment CSV");
  app.add_option("--model-file", o.model_file, "Model JSON");
  app.add_option("--bootstrap-iterations", o.bootstrap_iterations,
                 "Bootstrap resamples");
  app.add_option("--methods", o.methods,
                 "Method families to optimize (spc, if, bs, naive_bs_spc, ...)");

  auto* generate = app.add_subcommand("generate", "Write a synthetic fleet");
  generate->add_option("--stations", o.stations, "Number of stations");
  auto* split = app.add_subcommand("split", "Stratified train/validation/test split");
  auto* preprocess = app.add_subcommand("preprocess", "Write difference series");
  auto* optimize = app.add_subcommand("optimize", "Grid search and threshold fitting");
  auto* evaluate = app.add_subcommand("evaluate", "Score selected models on the test split");

  std::string method;
  std::vector<fs::path> files;
  auto* annotate = app.add_subcommand("annotate", "Apply a model to station files");
  annotate->add_option("--method", method, "Method name in the model file");
  annotate->add_option("files", files, "Station CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  auto* estimate = app.add_subcommand("estimate-loads",
                                      "Compare load estimates against ground truth");
  estimate->add_option("--method", method,
                       "Filter with this model method (default: unfiltered)");

  for (auto* sub : app.get_subcommands({}))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto c = cli::resolve_config(config, o);
    const auto* sub = app.get_subcommands().front();
    cli::write_snapshot(c, sub->get_name());
    if (sub == generate) return cli::cmd_generate(c);
    if (sub == split) return cli::cmd_split(c);
    if (sub == preprocess) return cli::cmd_preprocess(c);
    if (sub == optimize) return cli::cmd_optimize(c);
    if (sub == evaluate) return cli::cmd_evaluate(c);
    if (sub == annotate) return cli::cmd_annotate(c, method, files);
    if (sub == estimate) return cli::cmd_estimate_loads(c, method);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const OptimizationError& e) {
    std::fprintf(stderr, "optimization error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
