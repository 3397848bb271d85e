#include "loadseg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "loadseg/binseg.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/io.hpp"
#include "loadseg/log.hpp"
#include "loadseg/parallel.hpp"
#include "loadseg/runs.hpp"
#include "loadseg/timestamp.hpp"

namespace loadseg {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig

fs::path RunConfig::resolved_split_file() const {
  return split_file.empty() ? output_dir / "split.csv" : split_file;
}

fs::path RunConfig::resolved_model_file() const {
  return model_file.empty() ? output_dir / "model.json" : model_file;
}

void RunConfig::validate() const {
  preprocess.validate();
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
  if (bootstrap_iterations < 1)
    throw ConfigError("bootstrap_iterations must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (methods.empty()) throw ConfigError("no methods selected");
  for (auto m : methods)
    if (candidates(m, grid).empty())
      throw ConfigError("empty grid for method '" + std::string(to_string(m)) +
                        "'");
}

json to_json(const RunConfig& c) {
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  json fleet;
  to_json(fleet, c.generate);
  return {{"data_dir", c.data_dir.string()},
          {"output_dir", c.output_dir.string()},
          {"split_file", c.resolved_split_file().string()},
          {"model_file", c.resolved_model_file().string()},
          {"seed", c.seed},
          {"jobs", c.jobs},
          {"bootstrap_iterations", c.bootstrap_iterations},
          {"beta", c.beta},
          {"margin", c.margin},
          {"vi_scale", c.load.vi_scale},
          {"preprocess",
           {{"max_repeats", c.preprocess.max_repeats},
            {"q_lower", c.preprocess.q_lower},
            {"q_upper", c.preprocess.q_upper}}},
          {"generate", fleet},
          {"grid", to_json(c.grid)},
          {"methods", methods}};
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "data_dir", "output_dir", "split_file", "model_file", "seed",
      "jobs", "bootstrap_iterations", "beta", "margin", "vi_scale",
      "preprocess", "generate", "grid", "methods"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");

  RunConfig c;
  try {
    auto path = [&](const char* key, fs::path& out) {
      if (j.contains(key)) out = j.at(key).get<std::string>();
    };
    path("data_dir", c.data_dir);
    path("output_dir", c.output_dir);
    path("split_file", c.split_file);
    path("model_file", c.model_file);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<std::size_t>();
    if (j.contains("bootstrap_iterations"))
      c.bootstrap_iterations = j.at("bootstrap_iterations").get<std::size_t>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("margin")) c.margin = j.at("margin").get<double>();
    if (j.contains("vi_scale")) c.load.vi_scale = j.at("vi_scale").get<double>();
    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      for (const auto& [k, v] : p.items())
        if (k != "max_repeats" && k != "q_lower" && k != "q_upper")
          throw ConfigError("preprocess: unknown key '" + k + "'");
      c.preprocess.max_repeats = p.value("max_repeats", c.preprocess.max_repeats);
      c.preprocess.q_lower = p.value("q_lower", c.preprocess.q_lower);
      c.preprocess.q_upper = p.value("q_upper", c.preprocess.q_upper);
    }
    if (j.contains("generate")) from_json(j.at("generate"), c.generate);
    if (j.contains("grid")) c.grid = grid_spec_from_json(j.at("grid"));
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& s : j.at("methods").get<std::vector<std::string>>())
        c.methods.push_back(method_family_from_string(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Data preparation

PreparedStation prepare_station(const StationSeries& station,
                                const PreprocessConfig& cfg) {
  auto r = preprocess(station, cfg);
  PreparedStation p;
  p.labels = categorize(r.series);
  p.series = std::move(r.series);
  p.fit = r.fit;
  p.sign_corrected = r.sign_corrected;
  p.removed_count = r.removed_count;
  return p;
}

std::vector<PreparedStation> prepare_stations(
    std::span<const StationSeries> stations, const PreprocessConfig& cfg,
    std::size_t jobs) {
  std::vector<PreparedStation> out(stations.size());
  parallel_for(stations.size(), jobs, [&](std::size_t k) {
    out[k] = prepare_station(stations[k], cfg);
  });
  return out;
}

SplitData split_stations(std::vector<PreparedStation> stations,
                         const SplitAssignment& split) {
  SplitData out;
  std::set<std::string> seen;
  for (auto& s : stations) {
    const auto it = split.find(s.series.station_id);
    if (it == split.end())
      throw DataError("station '" + s.series.station_id +
                      "' has no split assignment");
    seen.insert(s.series.station_id);
    switch (it->second) {
      case Split::Train:
        out.train.push_back(std::move(s));
        break;
      case Split::Validation:
        out.validation.push_back(std::move(s));
        break;
      case Split::Test:
        out.test.push_back(std::move(s));
        break;
    }
  }
  for (const auto& [id, sp] : split)
    if (!seen.count(id))
      throw DataError("split assigns missing station '" + id + "'");
  return out;
}

std::vector<DifferenceSeries> series_of(std::span<const PreparedStation> s) {
  std::vector<DifferenceSeries> out;
  out.reserve(s.size());
  for (const auto& p : s) out.push_back(p.series);
  return out;
}

std::vector<CategorizedLabels> labels_of(std::span<const PreparedStation> s) {
  std::vector<CategorizedLabels> out;
  out.reserve(s.size());
  for (const auto& p : s) out.push_back(p.labels);
  return out;
}

// ---------------------------------------------------------------------------
// Grid search

namespace {

template <typename V>
class LazyCache {
 public:
  template <typename Make>
  std::shared_ptr<const V> get(const std::string& key, Make make) {
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mutex_);
      auto& p = slots_[key];
      if (!p) p = std::make_shared<Slot>();
      slot = p;
    }
    std::call_once(slot->once, [&] {
      try {
        slot->value = std::make_shared<const V>(make());
      } catch (...) {
        slot->error = std::current_exception();
      }
    });
    if (slot->error) std::rethrow_exception(slot->error);
    return slot->value;
  }

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const V> value;
    std::exception_ptr error;
  };
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

// Config JSON without the threshold strategy: everything that affects scores.
std::string scoring_key(const DetectorConfig& c) {
  auto j = to_json(c);
  j.erase("threshold_strategy");
  return j.dump();
}

std::string model_key(const DetectorConfig& c, CategorySet objective) {
  return to_json(c).dump() + "/" + std::to_string(objective.bits());
}

std::uint64_t mask_hash(std::span<const PredictionSeries> preds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  for (const auto& p : preds) {
    mix(p.size());
    for (auto v : p.predictions) mix(v);
  }
  return h;
}

PredictionSeries or_merge(const PredictionSeries& a, const PredictionSeries& b) {
  return ensemble_naive(a, b);
}

struct Segmentation {
  std::vector<BinsegNode> tree;
  // Penalty per unit of beta.
  double penalty_factor = 0.0;
  double tree_beta = 0.0;
};

class GridEvaluator {
 public:
  GridEvaluator(std::span<const PreparedStation> train,
                std::span<const PreparedStation> validation,
                const RunConfig& config)
      : config_(config) {
    series_[0] = series_of(train);
    series_[1] = series_of(validation);
    labels_[0] = labels_of(train);
    labels_[1] = labels_of(validation);
    min_beta_ = std::numeric_limits<double>::infinity();
    for (const auto& c : expand(config.grid.binseg))
      min_beta_ = std::min(min_beta_, c.beta);
    if (config.grid.ensemble_binseg)
      for (const auto& c : expand(*config.grid.ensemble_binseg))
        min_beta_ = std::min(min_beta_, c.beta);
  }

  double evaluate(const Candidate& c) {
    if (!c.ensemble) {
      const auto model = full_model(c.single, CategorySet::all());
      const auto preds = validation_predictions(*model);
      return metrics(*preds);
    }
    const auto& e = *c.ensemble;
    const DetectorConfig long_cfg = e.long_detector;
    const DetectorConfig short_cfg = to_detector_config(e.short_detector);
    if (e.strategy != EnsembleStrategy::Sequential) {
      const bool naive = e.strategy == EnsembleStrategy::Naive;
      const auto lm =
          full_model(long_cfg, naive ? CategorySet::all() : e.long_categories);
      const auto sm =
          full_model(short_cfg, naive ? CategorySet::all() : e.short_categories);
      const auto lp = validation_predictions(*lm);
      const auto sp = validation_predictions(*sm);
      std::vector<PredictionSeries> merged;
      for (std::size_t k = 0; k < lp->size(); ++k)
        merged.push_back(or_merge((*lp)[k], (*sp)[k]));
      return metrics(merged);
    }

    const auto lm = full_model(long_cfg, e.long_categories);
    const auto train_stage_one = predictions(0, *lm);
    const auto train_hash = std::to_string(mask_hash(*train_stage_one));
    const auto second = second_stage_.get(
        train_hash + "|" + model_key(short_cfg, e.short_categories), [&] {
          return train_second_stage(
              short_cfg,
              build_residuals(series_[0], labels_[0], *train_stage_one),
              e.short_categories, config_.seed, config_.beta);
        });
    const auto val_stage_one = predictions(1, *lm);
    const auto val_hash = std::to_string(mask_hash(*val_stage_one));
    const auto stage_two = second_stage_predictions_.get(
        train_hash + "|" + val_hash + "|" +
            model_key(short_cfg, e.short_categories),
        [&] {
          MethodModel m;
          m.ensemble = EnsembleStrategy::Sequential;
          m.primary = *lm;
          m.secondary = *second;
          std::vector<PredictionSeries> out;
          for (std::size_t k = 0; k < series_[1].size(); ++k)
            out.push_back(second_stage_only(m, series_[1][k], (*val_stage_one)[k]));
          return out;
        });
    std::vector<PredictionSeries> merged;
    for (std::size_t k = 0; k < val_stage_one->size(); ++k)
      merged.push_back(or_merge((*val_stage_one)[k], (*stage_two)[k]));
    return metrics(merged);
  }

 private:
  double metrics(std::span<const PredictionSeries> preds) const {
    return dataset_metrics(labels_[1], preds, config_.beta).average_f_beta;
  }

  static PredictionSeries second_stage_only(const MethodModel& m,
                                            const DifferenceSeries& series,
                                            const PredictionSeries& stage_one) {
    const auto* f = std::get_if<IfConfig>(&m.secondary->scorer.config);
    PredictionSeries out{series.station_id,
                         std::vector<std::uint8_t>(series.size(), 0)};
    if (f && f->pooled && !m.secondary->scorer.pooled_forest) return out;
    std::vector<std::size_t> idx;
    const auto residual = residual_series(series, stage_one, idx);
    if (residual.size() == 0) return out;
    const auto p = apply_thresholds(score(m.secondary->scorer, residual),
                                    m.secondary->thresholds);
    for (std::size_t k = 0; k < idx.size(); ++k)
      out.predictions[idx[k]] = p.predictions[k];
    return out;
  }

  std::shared_ptr<const Scorer> scorer(const DetectorConfig& cfg) {
    return scorers_.get(scoring_key(cfg), [&] {
      return make_scorer(cfg, series_[0], config_.seed);
    });
  }

  std::shared_ptr<const std::vector<double>> scaled(int split, std::size_t k,
                                                    double lo, double hi) {
    std::ostringstream key;
    key << split << '/' << k << '/' << lo << '/' << hi;
    return scaled_.get(key.str(), [&] {
      return robust_scale(series_[split][k].delta, lo, hi).values;
    });
  }

  std::shared_ptr<const Segmentation> segmentation(int split, std::size_t k,
                                                   const BinsegConfig& c) {
    std::ostringstream key;
    key << split << '/' << k << '/' << c.q_lower << '/' << c.q_upper << '/'
        << c.min_size << '/' << c.jump << '/' << to_string(c.penalty);
    return segmentations_.get(key.str(), [&] {
      const auto z = scaled(split, k, c.q_lower, c.q_upper);
      Segmentation s;
      s.penalty_factor =
          split_penalty(*z, {1.0, c.min_size, c.jump, c.penalty});
      s.tree_beta = min_beta_;
      s.tree = binseg_tree(*z, c.min_size, c.jump, min_beta_ * s.penalty_factor);
      return s;
    });
  }

  ScoreSeries binseg_scores(int split, std::size_t k, const BinsegConfig& c) {
    if (c.beta < min_beta_) return binseg_score(series_[split][k], c).scores;
    const auto z = scaled(split, k, c.q_lower, c.q_upper);
    const auto seg = segmentation(split, k, c);
    // Same arithmetic as split_penalty so that the tree agrees with a direct
    // segmentation.
    const double pen = split_penalty(*z, {c.beta, c.min_size, c.jump, c.penalty});
    const auto bkps = breakpoints_from_tree(seg->tree, pen);
    const double ref = find_reference_value(*z, bkps, c.reference_point);
    return {series_[split][k].station_id, segment_scores(*z, bkps, ref),
            Polarity::ZeroCentered};
  }

  // Full-series scores of every station in a split.
  std::shared_ptr<const std::vector<ScoreSeries>> scores(
      int split, const DetectorConfig& cfg) {
    if (const auto* bs = std::get_if<BinsegConfig>(&cfg)) {
      auto out = std::make_shared<std::vector<ScoreSeries>>();
      for (std::size_t k = 0; k < series_[split].size(); ++k)
        out->push_back(binseg_scores(split, k, *bs));
      return out;
    }
    return scores_.get(std::to_string(split) + "|" + scoring_key(cfg), [&] {
      const auto sc = scorer(cfg);
      std::vector<ScoreSeries> out;
      for (const auto& s : series_[split]) out.push_back(score(*sc, s));
      return out;
    });
  }

  std::shared_ptr<const DetectorModel> full_model(const DetectorConfig& cfg,
                                                  CategorySet objective) {
    return models_.get(model_key(cfg, objective), [&] {
      const auto train_scores = scores(0, cfg);
      OptimizeOptions opt;
      opt.strategy = threshold_strategy_of(cfg);
      opt.objective = objective;
      opt.beta = config_.beta;
      const auto r = optimize_thresholds(*train_scores, labels_[0], opt);
      DetectorModel m;
      m.scorer = *scorer(cfg);
      m.thresholds = r.threshold_set;
      m.objective = objective;
      m.achieved = r.achieved;
      m.candidate_count = r.candidate_count;
      m.capped = r.capped;
      return m;
    });
  }

  std::shared_ptr<const std::vector<PredictionSeries>> predictions(
      int split, const DetectorModel& m) {
    auto make = [&] {
      const auto sc = scores(split, m.scorer.config);
      std::vector<PredictionSeries> out;
      for (const auto& s : *sc) out.push_back(apply_thresholds(s, m.thresholds));
      return out;
    };
    if (std::holds_alternative<BinsegConfig>(m.scorer.config))
      return std::make_shared<const std::vector<PredictionSeries>>(make());
    return predictions_.get(std::to_string(split) + "|" +
                                model_key(m.scorer.config, m.objective),
                            make);
  }

  std::shared_ptr<const std::vector<PredictionSeries>> validation_predictions(
      const DetectorModel& m) {
    return predictions(1, m);
  }

  const RunConfig& config_;
  std::vector<DifferenceSeries> series_[2];
  std::vector<CategorizedLabels> labels_[2];
  double min_beta_ = 0.0;

  LazyCache<Scorer> scorers_;
  LazyCache<std::vector<double>> scaled_;
  LazyCache<Segmentation> segmentations_;
  LazyCache<std::vector<ScoreSeries>> scores_;
  LazyCache<DetectorModel> models_;
  LazyCache<std::vector<PredictionSeries>> predictions_;
  LazyCache<DetectorModel> second_stage_;
  LazyCache<std::vector<PredictionSeries>> second_stage_predictions_;
};

MethodModel train_candidate(const Candidate& c,
                            std::span<const PreparedStation> train,
                            const RunConfig& config) {
  const auto series = series_of(train);
  const auto labels = labels_of(train);
  if (c.ensemble)
    return train_ensemble(*c.ensemble, series, labels, config.seed,
                          config.beta, config.jobs);
  return train_single(c.single, series, labels, config.seed, config.beta,
                      config.jobs);
}

DatasetMetrics evaluate_model(const MethodModel& m,
                              std::span<const PreparedStation> stations,
                              double beta, std::size_t jobs,
                              std::vector<MethodOutput>* outputs = nullptr) {
  std::vector<MethodOutput> out(stations.size());
  parallel_for(stations.size(), jobs, [&](std::size_t k) {
    out[k] = apply_method(m, stations[k].series);
  });
  std::vector<PredictionSeries> preds;
  for (const auto& o : out) preds.push_back(o.predictions);
  const auto labels = labels_of(stations);
  auto metrics = dataset_metrics(labels, preds, beta);
  if (outputs) *outputs = std::move(out);
  return metrics;
}

}  // namespace

std::vector<FamilySelection> select_models(
    std::span<const PreparedStation> train,
    std::span<const PreparedStation> validation, const RunConfig& config) {
  config.validate();
  if (train.empty()) throw DataError("no training stations");
  if (validation.empty()) throw DataError("no validation stations");
  GridEvaluator grid(train, validation, config);

  std::vector<FamilySelection> out;
  for (auto family : config.methods) {
    const auto cands = candidates(family, config.grid);
    std::vector<CandidateScore> scores(cands.size());
    parallel_for(cands.size(), config.jobs, [&](std::size_t k) {
      scores[k].index = k;
      try {
        scores[k].validation_f_beta = grid.evaluate(cands[k]);
      } catch (const OptimizationError& e) {
        scores[k].error = e.what();
      } catch (const DataError& e) {
        scores[k].error = e.what();
      }
    });
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (scores[k].error) continue;
      if (!best || scores[k].validation_f_beta > scores[*best].validation_f_beta)
        best = k;
    }
    if (!best)
      throw OptimizationError("method '" + std::string(to_string(family)) +
                              "': every candidate failed: " +
                              *scores.front().error);

    FamilySelection sel;
    sel.family = family;
    sel.chosen = cands[*best];
    sel.chosen_index = *best;
    sel.model = train_candidate(sel.chosen, train, config);
    sel.validation =
        evaluate_model(sel.model, validation, config.beta, config.jobs);
    if (sel.validation.average_f_beta != scores[*best].validation_f_beta)
      warn("method '" + std::string(to_string(family)) +
           "': retrained validation score " +
           format_double(sel.validation.average_f_beta) +
           " differs from grid score " +
           format_double(scores[*best].validation_f_beta));
    sel.scores = std::move(scores);
    out.push_back(std::move(sel));
  }
  return out;
}

ModelFile to_model_file(std::span<const FamilySelection> selections,
                        const RunConfig& config) {
  ModelFile f;
  f.beta = config.beta;
  for (const auto& s : selections) {
    std::size_t failed = 0;
    for (const auto& c : s.scores) failed += c.error ? 1 : 0;
    NamedModel nm;
    nm.name = std::string(to_string(s.family));
    nm.model = s.model;
    nm.provenance = {{"candidate", s.chosen.to_json()},
                     {"candidate_index", s.chosen_index},
                     {"grid_size", s.scores.size()},
                     {"failed_candidates", failed},
                     {"seed", config.seed},
                     {"validation", to_json(s.validation)}};
    f.methods.push_back(std::move(nm));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Evaluation

LoadComparison compare_load_estimates(
    std::span<const PreparedStation> stations,
    std::span<const PredictionSeries> predictions, double margin) {
  if (stations.size() != predictions.size())
    throw DataError("load estimation: stations and predictions differ in count");
  LoadComparison out;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    const auto& s = stations[k].series;
    LoadEstimate truth, pred;
    try {
      truth = load_estimate_ground_truth(s);
      pred = load_estimate(s, predictions[k]);
    } catch (const DataError&) {
      out.fully_filtered.push_back(s.station_id);
      continue;
    }
    out.truth.push_back(truth);
    out.predicted.push_back(pred);
    out.unfiltered.push_back(load_estimate_unfiltered(s));
  }
  out.predicted_errors = estimate_errors(out.truth, out.predicted, margin);
  out.unfiltered_errors = estimate_errors(out.truth, out.unfiltered, margin);
  return out;
}

std::vector<MethodEvaluation> evaluate_models(
    const ModelFile& models, std::span<const PreparedStation> stations,
    const RunConfig& config) {
  if (stations.empty()) throw DataError("no stations to evaluate");
  const auto labels = labels_of(stations);
  std::vector<MethodEvaluation> out;
  for (const auto& nm : models.methods) {
    MethodEvaluation e;
    e.name = nm.name;
    e.model = nm.model;
    e.metrics = evaluate_model(nm.model, stations, models.beta, config.jobs,
                               &e.outputs);
    std::vector<ConfusionTable> tables;
    std::vector<PredictionSeries> preds;
    for (std::size_t k = 0; k < stations.size(); ++k) {
      tables.push_back(confusion_table(labels[k], e.outputs[k].predictions.predictions));
      preds.push_back(e.outputs[k].predictions);
    }
    e.bootstrap = bootstrap_metrics(tables, config.bootstrap_iterations,
                                    config.seed, models.beta, config.jobs);
    if (!nm.model.ensemble) {
      std::vector<ScoreSeries> scores;
      for (const auto& o : e.outputs) scores.push_back(o.primary_scores);
      e.auc = category_auc(labels, scores);
    }
    e.loads = compare_load_estimates(stations, preds, config.margin);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

json summary_json(const BootstrapSummary& s) {
  return {{"mean", json_number(s.mean)},
          {"std", json_number(s.std)},
          {"iterations", s.iterations}};
}

json bound_json(const BoundSummary& b) {
  return {{"stations", b.stations},
          {"undefined", b.undefined},
          {"fraction_exact", b.fraction_exact},
          {"fraction_within_margin", b.fraction_within_margin}};
}

json loads_json(const LoadComparison& l) {
  return {{"margin", l.predicted_errors.margin},
          {"predicted", {{"max", bound_json(l.predicted_errors.max)},
                         {"min", bound_json(l.predicted_errors.min)}}},
          {"unfiltered", {{"max", bound_json(l.unfiltered_errors.max)},
                          {"min", bound_json(l.unfiltered_errors.min)}}},
          {"fully_filtered", l.fully_filtered}};
}

}  // namespace

json evaluation_report(std::span<const MethodEvaluation> evals,
                       std::span<const PreparedStation> stations,
                       const RunConfig& config) {
  json ids = json::array();
  for (const auto& s : stations) ids.push_back(s.series.station_id);
  json methods = json::array();
  for (const auto& e : evals) {
    json cats = json::object();
    for (auto c : kAllCategories) {
      const auto i = index_of(c);
      const auto& m = e.metrics.categories[i];
      json auc = nullptr;
      if (e.auc && (*e.auc)[i]) auc = *(*e.auc)[i];
      cats[std::string(to_string(c))] = {
          {"tp", m.counts.tp},
          {"fp", m.counts.fp},
          {"fn", m.counts.fn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f_beta", m.f_beta},
          {"has_positives", m.has_positives},
          {"auc", auc},
          {"bootstrap",
           {{"precision", summary_json(e.bootstrap.precision[i])},
            {"recall", summary_json(e.bootstrap.recall[i])},
            {"f_beta", summary_json(e.bootstrap.f_beta[i])}}}};
    }
    methods.push_back(
        {{"name", e.name},
         {"model", to_json(e.model)["ensemble"]},
         {"categories", cats},
         {"average",
          {{"precision", e.metrics.average_precision},
           {"recall", e.metrics.average_recall},
           {"f_beta", e.metrics.average_f_beta},
           {"categories", to_strings(e.metrics.averaged)},
           {"bootstrap",
            {{"precision", summary_json(e.bootstrap.average_precision)},
             {"recall", summary_json(e.bootstrap.average_recall)},
             {"f_beta", summary_json(e.bootstrap.average_f_beta)}}}}},
         {"load_estimation", loads_json(e.loads)}});
  }
  return {{"beta", evals.empty() ? config.beta : config.beta},
          {"stations", ids},
          {"bootstrap", {{"iterations", config.bootstrap_iterations},
                         {"seed", config.seed},
                         {"std", "population"}}},
          {"auc_effective_score",
           "absolute value for zero-centered scores, raw for non-negative"},
          {"methods", methods}};
}

std::string plot_data_csv(std::span<const MethodEvaluation> evals) {
  std::string out = "method,category,metric,mean,std\n";
  auto row = [&](const std::string& m, std::string_view c, const char* metric,
                 const BootstrapSummary& s) {
    out += m + "," + std::string(c) + "," + metric + "," +
           format_double(s.mean) + "," + format_double(s.std) + "\n";
  };
  for (const auto& e : evals) {
    for (auto c : kAllCategories) {
      const auto i = index_of(c);
      row(e.name, to_string(c), "precision", e.bootstrap.precision[i]);
      row(e.name, to_string(c), "recall", e.bootstrap.recall[i]);
      row(e.name, to_string(c), "f_beta", e.bootstrap.f_beta[i]);
    }
    row(e.name, "average", "precision", e.bootstrap.average_precision);
    row(e.name, "average", "recall", e.bootstrap.average_recall);
    row(e.name, "average", "f_beta", e.bootstrap.average_f_beta);
  }
  return out;
}

std::string auc_csv(std::span<const MethodEvaluation> evals) {
  std::string out = "method,category,auc\n";
  for (const auto& e : evals) {
    if (!e.auc) continue;
    for (auto c : kAllCategories) {
      const auto& a = (*e.auc)[index_of(c)];
      out += e.name + "," + std::string(to_string(c)) + "," +
             (a ? format_double(*a) : std::string()) + "\n";
    }
  }
  return out;
}

std::string estimates_csv(const LoadComparison& loads) {
  std::string out = "station_id,source,max_load,min_load\n";
  auto rows = [&](const std::vector<LoadEstimate>& v) {
    for (const auto& e : v)
      out += e.station_id + "," + std::string(to_string(e.source)) + "," +
             format_double(e.max_load) + "," +
             (e.min_load ? format_double(*e.min_load) : std::string()) + "\n";
  };
  rows(loads.truth);
  rows(loads.predicted);
  rows(loads.unfiltered);
  return out;
}

std::string scatter_csv(const LoadComparison& loads) {
  std::string out = "station_id,truth,predicted,bound\n";
  for (const auto& r : loads.predicted_errors.rows)
    out += r.station_id + "," + format_double(r.truth) + "," +
           format_double(r.predicted) + "," + (r.is_max ? "max" : "min") + "\n";
  return out;
}

std::string difference_csv(const DifferenceSeries& series) {
  std::string out = "timestamp,delta,s_signed,label\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out += format_timestamp(series.timestamps[i]) + "," +
           format_double(series.delta[i]) + "," +
           format_double(series.s_signed[i]) + "," +
           std::to_string(to_int(series.labels[i])) + "\n";
  return out;
}

DifferenceSeries parse_difference_csv(std::string_view text,
                                      std::string station_id) {
  DifferenceSeries s;
  s.station_id = std::move(station_id);
  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    ++row;
    const auto f = split_csv_line(line);
    if (row == 1) {
      if (f.size() != 4 || f[0] != "timestamp" || f[1] != "delta" ||
          f[2] != "s_signed" || f[3] != "label")
        throw DataError(s.station_id +
                        ": expected header timestamp,delta,s_signed,label");
      continue;
    }
    if (f.size() != 4)
      throw DataError(s.station_id + ": wrong field count at row " +
                      std::to_string(row));
    try {
      s.timestamps.push_back(parse_timestamp(f[0]));
      s.delta.push_back(std::stod(std::string(f[1])));
      s.s_signed.push_back(std::stod(std::string(f[2])));
      const auto lab = label_from_int(std::stol(std::string(f[3])));
      if (!lab) throw DataError("");
      s.labels.push_back(*lab);
    } catch (const std::exception&) {
      throw DataError(s.station_id + ": invalid value at row " +
                      std::to_string(row));
    }
  }
  s.validate();
  return s;
}

}  // namespace loadseg
