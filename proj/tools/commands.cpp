#include "commands.hpp"

#include <cstdio>
#include <iostream>
#include <map>

#include "loadseg/errors.hpp"
#include "loadseg/io.hpp"
#include "loadseg/log.hpp"
#include "loadseg/model_io.hpp"
#include "loadseg/random.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/split.hpp"
#include "loadseg/timestamp.hpp"

namespace loadseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig resolve_config(const std::optional<fs::path>& file,
                         const Overrides& o) {
  json j = json::object();
  if (file) {
    if (!fs::exists(*file))
      throw ConfigError("config file '" + file->string() + "' not found");
    j = read_json_file(*file);
  }
  if (o.seed) j["seed"] = *o.seed;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (o.output_dir) j["output_dir"] = o.output_dir->string();
  if (o.data_dir) j["data_dir"] = o.data_dir->string();
  if (o.split_file) j["split_file"] = o.split_file->string();
  if (o.model_file) j["model_file"] = o.model_file->string();
  if (o.bootstrap_iterations) j["bootstrap_iterations"] = *o.bootstrap_iterations;
  if (o.stations) j["generate"]["stations"] = *o.stations;
  if (!o.methods.empty()) j["methods"] = o.methods;
  return run_config_from_json(j);
}

void write_snapshot(const RunConfig& c, const std::string& command) {
  fs::create_directories(c.output_dir);
  auto j = to_json(c);
  j["command"] = command;
  write_json_file(c.output_dir / ("resolved_config." + command + ".json"), j);
}

namespace {

json tally_json(const CategoryTally& t) {
  return {{"events", t.events}, {"samples", t.samples}};
}

std::vector<StationSeries> load_data(const RunConfig& c) {
  if (!fs::is_directory(c.data_dir))
    throw DataError("data directory '" + c.data_dir.string() + "' not found");
  auto stations = load_stations(c.data_dir, c.load);
  if (stations.empty())
    throw DataError("no station files in '" + c.data_dir.string() + "'");
  return stations;
}

SplitData load_split_data(const RunConfig& c) {
  const auto split_path = c.resolved_split_file();
  if (!fs::exists(split_path))
    throw ConfigError("split file '" + split_path.string() +
                      "' not found; run `loadseg split` first");
  const auto split = load_split(split_path);
  return split_stations(
      prepare_stations(load_data(c), c.preprocess, c.jobs), split);
}

void print_tally(const std::array<CategoryTally, 3>& t) {
  std::printf("%-11s %7s %7s %7s %7s   %9s %9s %9s %9s\n", "split", "ev:C1",
              "ev:C2", "ev:C3", "ev:C4", "lab1:C1", "lab1:C2", "lab1:C3",
              "lab1:C4");
  CategoryTally total;
  for (auto s : {Split::Train, Split::Validation, Split::Test}) {
    const auto& x = t[static_cast<std::size_t>(s)];
    total += x;
    std::printf("%-11s %7zu %7zu %7zu %7zu   %9zu %9zu %9zu %9zu\n",
                std::string(to_string(s)).c_str(), x.events[0], x.events[1],
                x.events[2], x.events[3], x.samples[0], x.samples[1],
                x.samples[2], x.samples[3]);
  }
  std::printf("%-11s %7zu %7zu %7zu %7zu   %9zu %9zu %9zu %9zu\n", "total",
              total.events[0], total.events[1], total.events[2],
              total.events[3], total.samples[0], total.samples[1],
              total.samples[2], total.samples[3]);
}

const NamedModel& pick_method(const ModelFile& f, const std::string& name) {
  if (name.empty()) {
    if (f.methods.size() == 1) return f.methods.front();
    std::string names;
    for (const auto& m : f.methods) names += " " + m.name;
    throw ConfigError("model file holds several methods; choose one with "
                      "--method:" + names);
  }
  for (const auto& m : f.methods)
    if (m.name == name) return m;
  throw ConfigError("method '" + name + "' not in model file");
}

std::string artifact_csv(const DifferenceSeries& s, const MethodOutput& o) {
  const bool two = o.secondary_scores.has_value();
  std::string out = two ? "timestamp,score,secondary_score,prediction\n"
                        : "timestamp,score,prediction\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_timestamp(s.timestamps[i]) + "," +
           format_double(o.primary_scores.scores[i]) + ",";
    if (two) out += format_double(o.secondary_scores->scores[i]) + ",";
    out += std::to_string(o.predictions.predictions[i]) + "\n";
  }
  return out;
}

std::string estimate_row(const LoadEstimate& e) {
  return e.station_id + "," + std::string(to_string(e.source)) + "," +
         format_double(e.max_load) + "," +
         (e.min_load ? format_double(*e.min_load) : std::string()) + "\n";
}

}  // namespace

int cmd_generate(const RunConfig& c) {
  const auto fleet = generate_fleet(c.generate, c.seed);
  fs::create_directories(c.data_dir);
  json stations = json::array();
  for (const auto& st : fleet) {
    const auto& s = st.series;
    write_station(c.data_dir / (s.station_id + ".csv"), s);
    json inv;
    to_json(inv, st.inventory);
    stations.push_back({{"station_id", s.station_id},
                        {"samples", s.size()},
                        {"sign_capable", s.sign_capable},
                        {"inventory", inv},
                        {"tally", tally_json(tally_events(s.labels, s.timestamps))}});
  }
  json fleet_json;
  to_json(fleet_json, c.generate);
  write_json_file(c.data_dir / "manifest.json",
                  {{"seed", c.seed}, {"fleet", fleet_json}, {"stations", stations}});
  std::printf("wrote %zu stations to %s\n", fleet.size(),
              c.data_dir.string().c_str());
  return 0;
}

int cmd_split(const RunConfig& c) {
  const auto stations = load_data(c);
  const auto split = stratified_split(stations, c.seed);
  const auto path = c.resolved_split_file();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, split_to_csv(split));
  print_tally(split_tally(stations, split));
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_preprocess(const RunConfig& c) {
  const auto stations = load_data(c);
  const auto prepared = prepare_stations(stations, c.preprocess, c.jobs);
  const auto dir = c.output_dir / "preprocessed";
  fs::create_directories(dir);
  for (const auto& p : prepared) {
    const auto& id = p.series.station_id;
    write_file_atomic(dir / (id + ".csv"), difference_csv(p.series));
    write_json_file(dir / (id + ".json"),
                    {{"station_id", id},
                     {"m", p.fit.slope},
                     {"c", p.fit.offset},
                     {"degenerate_fit", p.fit.degenerate},
                     {"sign_corrected", p.sign_corrected},
                     {"removed_count", p.removed_count},
                     {"samples", p.series.size()}});
  }
  std::printf("preprocessed %zu stations into %s\n", prepared.size(),
              dir.string().c_str());
  return 0;
}

int cmd_optimize(const RunConfig& c) {
  const auto data = load_split_data(c);
  const auto selections = select_models(data.train, data.validation, c);
  const auto path = c.resolved_model_file();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_model_file(path, to_model_file(selections, c));

  std::string grid = "method,candidate_index,validation_f_beta,error\n";
  std::printf("%-20s %9s %12s\n", "method", "grid", "valid F");
  for (const auto& s : selections) {
    for (const auto& r : s.scores)
      grid += std::string(to_string(s.family)) + "," + std::to_string(r.index) +
              "," + (r.error ? "" : format_double(r.validation_f_beta)) + "," +
              (r.error ? *r.error : "") + "\n";
    std::printf("%-20s %9zu %12.6f\n", std::string(to_string(s.family)).c_str(),
                s.scores.size(), s.validation.average_f_beta);
  }
  fs::create_directories(c.output_dir);
  write_file_atomic(c.output_dir / "grid_scores.csv", grid);
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& c) {
  const auto model_path = c.resolved_model_file();
  if (!fs::exists(model_path))
    throw ConfigError("model file '" + model_path.string() +
                      "' not found; run `loadseg optimize` first");
  const auto models = load_model_file(model_path);
  const auto data = load_split_data(c);
  const auto evals = evaluate_models(models, data.test, c);

  fs::create_directories(c.output_dir);
  write_json_file(c.output_dir / "report.json",
                  evaluation_report(evals, data.test, c));
  write_file_atomic(c.output_dir / "plot_data.csv", plot_data_csv(evals));
  write_file_atomic(c.output_dir / "auc.csv", auc_csv(evals));

  const auto art = c.output_dir / "artifacts";
  fs::create_directories(art / "delta");
  for (const auto& p : data.test)
    write_file_atomic(art / "delta" / (p.series.station_id + ".csv"),
                      difference_csv(p.series));
  for (const auto& e : evals) {
    const auto dir = art / e.name;
    fs::create_directories(dir);
    for (std::size_t k = 0; k < data.test.size(); ++k)
      write_file_atomic(dir / (data.test[k].series.station_id + ".csv"),
                        artifact_csv(data.test[k].series, e.outputs[k]));
    write_file_atomic(dir / "estimates.csv", estimates_csv(e.loads));
    write_file_atomic(dir / "scatter.csv", scatter_csv(e.loads));
  }

  std::printf("%-20s %8s %8s %8s %8s %9s %9s %9s\n", "method", "F C1", "F C2",
              "F C3", "F C4", "F avg", "max<=10%", "min<=10%");
  for (const auto& e : evals) {
    const auto& m = e.metrics;
    std::printf("%-20s %8.4f %8.4f %8.4f %8.4f %9.4f %9.4f %9.4f\n",
                e.name.c_str(), m.categories[0].f_beta, m.categories[1].f_beta,
                m.categories[2].f_beta, m.categories[3].f_beta,
                m.average_f_beta,
                e.loads.predicted_errors.max.fraction_within_margin,
                e.loads.predicted_errors.min.fraction_within_margin);
  }
  std::printf("wrote %s\n", (c.output_dir / "report.json").string().c_str());
  return 0;
}

int cmd_annotate(const RunConfig& c, const std::string& method,
                 const std::vector<fs::path>& files) {
  if (files.empty()) throw ConfigError("annotate: no station files given");
  const auto model_path = c.resolved_model_file();
  if (!fs::exists(model_path))
    throw ConfigError("model file '" + model_path.string() + "' not found");
  const auto models = load_model_file(model_path);
  const auto& chosen = pick_method(models, method);

  LoadOptions opts = c.load;
  opts.require_labels = false;
  const auto dir = c.output_dir / "annotated";
  fs::create_directories(dir);
  std::string estimates = "station_id,source,max_load,min_load\n";
  for (const auto& f : files) {
    const auto station = load_station(f, opts);
    const auto prepared = prepare_station(station, c.preprocess);
    const auto& s = prepared.series;
    const auto out = apply_method(chosen.model, s);
    std::string csv = "timestamp,delta,prediction\n";
    for (std::size_t i = 0; i < s.size(); ++i)
      csv += format_timestamp(s.timestamps[i]) + "," + format_double(s.delta[i]) +
             "," + std::to_string(out.predictions.predictions[i]) + "\n";
    write_file_atomic(dir / (s.station_id + ".csv"), csv);
    estimates += estimate_row(load_estimate(s, out.predictions));
  }
  write_file_atomic(dir / "estimates.csv", estimates);
  std::printf("annotated %zu stations with '%s' into %s\n", files.size(),
              chosen.name.c_str(), dir.string().c_str());
  return 0;
}

int cmd_estimate_loads(const RunConfig& c, const std::string& method) {
  const auto stations = prepare_stations(load_data(c), c.preprocess, c.jobs);
  std::vector<PredictionSeries> preds;
  std::string name = "unfiltered";
  if (!method.empty()) {
    const auto models = load_model_file(c.resolved_model_file());
    const auto& chosen = pick_method(models, method);
    name = chosen.name;
    for (const auto& p : stations)
      preds.push_back(apply_method(chosen.model, p.series).predictions);
  } else {
    for (const auto& p : stations)
      preds.push_back({p.series.station_id,
                       std::vector<std::uint8_t>(p.series.size(), 0)});
  }
  const auto loads = compare_load_estimates(stations, preds, c.margin);
  fs::create_directories(c.output_dir);
  write_file_atomic(c.output_dir / "estimates.csv", estimates_csv(loads));
  write_file_atomic(c.output_dir / "scatter.csv", scatter_csv(loads));
  const auto& e = loads.predicted_errors;
  std::printf("%s: max exact %.4f within %.0f%% %.4f (%zu stations); "
              "min exact %.4f within %.0f%% %.4f (%zu stations)\n",
              name.c_str(), e.max.fraction_exact, 100 * e.margin,
              e.max.fraction_within_margin, e.max.stations,
              e.min.fraction_exact, 100 * e.margin,
              e.min.fraction_within_margin, e.min.stations);
  return 0;
}

}  // namespace loadseg::cli
