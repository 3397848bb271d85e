#include "loadseg/model_io.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

#include "loadseg/errors.hpp"
#include "loadseg/io.hpp"

namespace loadseg {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* what) {
  if (!j.is_object())
    throw ConfigError(std::string(what) + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k))
      throw ConfigError(std::string(what) + ": unknown key '" + k + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const char* what) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    throw ConfigError(std::string(what) + ": bad value for '" + key + "'");
  }
}

void read_number(const json& j, const char* key, double& out,
                 const char* what) {
  if (!j.contains(key)) return;
  try {
    out = number_from_json(j.at(key));
  } catch (const ConfigError&) {
    throw ConfigError(std::string(what) + ": bad value for '" + key + "'");
  }
}

std::string read_string(const json& j, const char* key, const char* what) {
  std::string s;
  if (!j.contains(key))
    throw ConfigError(std::string(what) + ": missing '" + key + "'");
  read(j, key, s, what);
  return s;
}

}  // namespace

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number, \"inf\" or \"-inf\"");
}

json to_json(const DetectorConfig& c) {
  if (const auto* s = std::get_if<SpcConfig>(&c))
    return {{"type", "spc"},
            {"q_lower", s->q_lower},
            {"q_upper", s->q_upper},
            {"threshold_strategy", to_string(s->threshold_strategy)}};
  if (const auto* f = std::get_if<IfConfig>(&c))
    return {{"type", "isolation_forest"},
            {"n_estimators", f->n_estimators},
            {"pooled", f->pooled},
            {"q_lower", f->q_lower},
            {"q_upper", f->q_upper},
            {"max_samples", f->max_samples}};
  const auto& b = std::get<BinsegConfig>(c);
  return {{"type", "binseg"},
          {"beta", b.beta},
          {"min_size", b.min_size},
          {"jump", b.jump},
          {"cost", "l1"},
          {"penalty", to_string(b.penalty)},
          {"q_lower", b.q_lower},
          {"q_upper", b.q_upper},
          {"reference_point", to_string(b.reference_point)},
          {"threshold_strategy", to_string(b.threshold_strategy)}};
}

DetectorConfig detector_config_from_json(const json& j) {
  const char* what = "detector config";
  if (!j.is_object()) throw ConfigError("detector config: expected an object");
  const auto type = read_string(j, "type", what);
  DetectorConfig out;
  if (type == "spc") {
    check_keys(j, {"type", "q_lower", "q_upper", "threshold_strategy"}, what);
    SpcConfig c;
    read(j, "q_lower", c.q_lower, what);
    read(j, "q_upper", c.q_upper, what);
    if (j.contains("threshold_strategy"))
      c.threshold_strategy = threshold_strategy_from_string(
          read_string(j, "threshold_strategy", what));
    out = c;
  } else if (type == "isolation_forest") {
    check_keys(j,
               {"type", "n_estimators", "pooled", "q_lower", "q_upper",
                "max_samples", "threshold_strategy"},
               what);
    IfConfig c;
    read(j, "n_estimators", c.n_estimators, what);
    read(j, "pooled", c.pooled, what);
    read(j, "q_lower", c.q_lower, what);
    read(j, "q_upper", c.q_upper, what);
    read(j, "max_samples", c.max_samples, what);
    if (j.contains("threshold_strategy") &&
        threshold_strategy_from_string(read_string(
            j, "threshold_strategy", what)) != ThresholdStrategy::Symmetrical)
      throw ConfigError("isolation forest supports symmetrical thresholds only");
    out = c;
  } else if (type == "binseg") {
    check_keys(j,
               {"type", "beta", "min_size", "jump", "cost", "penalty",
                "q_lower", "q_upper", "reference_point", "threshold_strategy"},
               what);
    BinsegConfig c;
    read(j, "beta", c.beta, what);
    read(j, "min_size", c.min_size, what);
    read(j, "jump", c.jump, what);
    if (j.contains("cost")) {
      const auto cost = read_string(j, "cost", what);
      if (cost != "l1" && cost != "L1")
        throw ConfigError("binseg: unsupported cost '" + cost + "'");
    }
    if (j.contains("penalty"))
      c.penalty = penalty_scaling_from_string(read_string(j, "penalty", what));
    read(j, "q_lower", c.q_lower, what);
    read(j, "q_upper", c.q_upper, what);
    if (j.contains("reference_point"))
      c.reference_point =
          reference_point_from_string(read_string(j, "reference_point", what));
    if (j.contains("threshold_strategy"))
      c.threshold_strategy = threshold_strategy_from_string(
          read_string(j, "threshold_strategy", what));
    out = c;
  } else {
    throw ConfigError("unknown detector type '" + type + "'");
  }
  validate(out);
  return out;
}

json to_json(const ThresholdSet& t) {
  if (const auto* s = std::get_if<SymmetricThreshold>(&t))
    return {{"type", "symmetrical"}, {"theta", json_number(s->theta)}};
  const auto& a = std::get<AsymmetricThreshold>(t);
  return {{"type", "asymmetrical"},
          {"lower", json_number(a.lower)},
          {"upper", json_number(a.upper)}};
}

ThresholdSet threshold_set_from_json(const json& j) {
  const char* what = "thresholds";
  if (!j.is_object()) throw ConfigError("thresholds: expected an object");
  const auto type = read_string(j, "type", what);
  if (type == "symmetrical") {
    check_keys(j, {"type", "theta"}, what);
    if (!j.contains("theta")) throw ConfigError("thresholds: missing 'theta'");
    SymmetricThreshold s;
    read_number(j, "theta", s.theta, what);
    if (!(s.theta >= 0.0))
      throw ConfigError("thresholds: theta must be >= 0");
    return s;
  }
  if (type == "asymmetrical") {
    check_keys(j, {"type", "lower", "upper"}, what);
    if (!j.contains("lower") || !j.contains("upper"))
      throw ConfigError("thresholds: missing 'lower' or 'upper'");
    AsymmetricThreshold a;
    read_number(j, "lower", a.lower, what);
    read_number(j, "upper", a.upper, what);
    if (!(a.lower < a.upper))
      throw ConfigError("thresholds: lower must be < upper");
    return a;
  }
  throw ConfigError("unknown threshold type '" + type + "'");
}

json to_json(const PooledForest& f) {
  return {{"subsample_size", f.forest.subsample_size()},
          {"q_lower", f.q_lower},
          {"q_upper", f.q_upper},
          {"breaks", f.forest.breaks()},
          {"mean_path", f.forest.mean_path()}};
}

PooledForest pooled_forest_from_json(const json& j) {
  const char* what = "pooled forest";
  check_keys(j, {"subsample_size", "q_lower", "q_upper", "breaks", "mean_path"},
             what);
  std::size_t psi = 0;
  std::vector<double> breaks, mean_path;
  PooledForest out;
  read(j, "subsample_size", psi, what);
  read(j, "q_lower", out.q_lower, what);
  read(j, "q_upper", out.q_upper, what);
  read(j, "breaks", breaks, what);
  read(j, "mean_path", mean_path, what);
  try {
    out.forest = IsolationForest::from_table(psi, std::move(breaks),
                                             std::move(mean_path));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

json to_json(const DetectorModel& m) {
  json j = {{"detector", to_json(m.scorer.config)},
            {"thresholds", to_json(m.thresholds)},
            {"seed", m.scorer.seed},
            {"objective", to_strings(m.objective)},
            {"achieved_f_beta", m.achieved},
            {"candidate_count", m.candidate_count},
            {"candidates_capped", m.capped}};
  if (m.scorer.pooled_forest)
    j["pooled_forest"] = to_json(*m.scorer.pooled_forest);
  return j;
}

DetectorModel detector_model_from_json(const json& j) {
  const char* what = "detector model";
  check_keys(j,
             {"detector", "thresholds", "seed", "objective", "achieved_f_beta",
              "candidate_count", "candidates_capped", "pooled_forest"},
             what);
  if (!j.contains("detector") || !j.contains("thresholds"))
    throw ConfigError("detector model: needs 'detector' and 'thresholds'");
  DetectorModel m;
  m.scorer.config = detector_config_from_json(j.at("detector"));
  m.thresholds = threshold_set_from_json(j.at("thresholds"));
  read(j, "seed", m.scorer.seed, what);
  if (j.contains("objective")) {
    std::vector<std::string> cats;
    read(j, "objective", cats, what);
    m.objective = category_set_from_strings(cats);
  }
  read(j, "achieved_f_beta", m.achieved, what);
  read(j, "candidate_count", m.candidate_count, what);
  read(j, "candidates_capped", m.capped, what);
  if (j.contains("pooled_forest"))
    m.scorer.pooled_forest = pooled_forest_from_json(j.at("pooled_forest"));

  const auto* f = std::get_if<IfConfig>(&m.scorer.config);
  const auto* sym = std::get_if<SymmetricThreshold>(&m.thresholds);
  const bool silent = sym && std::isinf(sym->theta);
  if (f && f->pooled && !m.scorer.pooled_forest && !silent)
    throw ConfigError("detector model: pooled forest table missing");
  if (std::holds_alternative<AsymmetricThreshold>(m.thresholds) &&
      polarity_of(m.scorer.config) != Polarity::ZeroCentered)
    throw ConfigError(
        "detector model: two-sided thresholds on non-negative scores");
  return m;
}

json to_json(const MethodModel& m) {
  json j = {{"ensemble", m.ensemble ? json(to_string(*m.ensemble)) : json()},
            {"primary", to_json(m.primary)}};
  if (m.secondary) j["secondary"] = to_json(*m.secondary);
  return j;
}

MethodModel method_model_from_json(const json& j) {
  const char* what = "method model";
  check_keys(j, {"ensemble", "primary", "secondary"}, what);
  if (!j.contains("primary")) throw ConfigError("method model: no 'primary'");
  MethodModel m;
  if (j.contains("ensemble") && !j.at("ensemble").is_null())
    m.ensemble = ensemble_strategy_from_string(read_string(j, "ensemble", what));
  m.primary = detector_model_from_json(j.at("primary"));
  if (j.contains("secondary"))
    m.secondary = detector_model_from_json(j.at("secondary"));
  if (m.ensemble && !m.secondary)
    throw ConfigError("method model: ensemble without 'secondary'");
  if (!m.ensemble && m.secondary)
    throw ConfigError("method model: 'secondary' without an ensemble");
  return m;
}

json to_json(const EnsembleConfig& c) {
  return {{"strategy", to_string(c.strategy)},
          {"long_detector", to_json(DetectorConfig{c.long_detector})},
          {"short_detector", to_json(to_detector_config(c.short_detector))},
          {"long_categories", to_strings(c.long_categories)},
          {"short_categories", to_strings(c.short_categories)}};
}

EnsembleConfig ensemble_config_from_json(const json& j) {
  const char* what = "ensemble config";
  check_keys(j,
             {"strategy", "long_detector", "short_detector", "long_categories",
              "short_categories"},
             what);
  EnsembleConfig c;
  if (j.contains("strategy"))
    c.strategy = ensemble_strategy_from_string(read_string(j, "strategy", what));
  if (j.contains("long_detector")) {
    const auto d = detector_config_from_json(j.at("long_detector"));
    if (!std::holds_alternative<BinsegConfig>(d))
      throw ConfigError("ensemble: long detector must be binseg");
    c.long_detector = std::get<BinsegConfig>(d);
  }
  if (j.contains("short_detector")) {
    const auto d = detector_config_from_json(j.at("short_detector"));
    if (const auto* s = std::get_if<SpcConfig>(&d))
      c.short_detector = *s;
    else if (const auto* f = std::get_if<IfConfig>(&d))
      c.short_detector = *f;
    else
      throw ConfigError("ensemble: short detector must be spc or isolation_forest");
  }
  std::vector<std::string> cats;
  if (j.contains("long_categories")) {
    read(j, "long_categories", cats, what);
    c.long_categories = category_set_from_strings(cats);
  }
  if (j.contains("short_categories")) {
    read(j, "short_categories", cats, what);
    c.short_categories = category_set_from_strings(cats);
  }
  c.validate();
  return c;
}

json to_json(const DatasetMetrics& m) {
  json cats = json::object();
  for (const auto& c : m.categories)
    cats[std::string(to_string(c.category))] = {
        {"tp", c.counts.tp},
        {"fp", c.counts.fp},
        {"fn", c.counts.fn},
        {"precision", c.precision},
        {"recall", c.recall},
        {"f_beta", c.f_beta},
        {"has_positives", c.has_positives}};
  return {{"categories", cats},
          {"average_f_beta", m.average_f_beta},
          {"average_precision", m.average_precision},
          {"average_recall", m.average_recall},
          {"averaged_categories", to_strings(m.averaged)}};
}

json to_json(const ModelFile& f) {
  json methods = json::array();
  for (const auto& m : f.methods)
    methods.push_back({{"name", m.name},
                       {"model", to_json(m.model)},
                       {"provenance", m.provenance}});
  return {{"format", "loadseg-model"},
          {"version", kModelFormatVersion},
          {"beta", f.beta},
          {"methods", methods}};
}

ModelFile model_file_from_json(const json& j) {
  const char* what = "model file";
  check_keys(j, {"format", "version", "beta", "methods"}, what);
  if (j.value("format", std::string()) != "loadseg-model")
    throw ConfigError("model file: not a loadseg model");
  int version = 0;
  read(j, "version", version, what);
  if (version != kModelFormatVersion)
    throw ConfigError("model file: unsupported version " +
                      std::to_string(version));
  ModelFile f;
  read(j, "beta", f.beta, what);
  if (!j.contains("methods") || !j.at("methods").is_array())
    throw ConfigError("model file: 'methods' must be an array");
  for (const auto& m : j.at("methods")) {
    check_keys(m, {"name", "model", "provenance"}, "model file method");
    NamedModel nm;
    nm.name = read_string(m, "name", what);
    if (!m.contains("model")) throw ConfigError("model file: method without model");
    nm.model = method_model_from_json(m.at("model"));
    if (m.contains("provenance")) nm.provenance = m.at("provenance");
    f.methods.push_back(std::move(nm));
  }
  return f;
}

json read_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void save_model_file(const std::filesystem::path& path, const ModelFile& f) {
  write_json_file(path, to_json(f));
}

ModelFile load_model_file(const std::filesystem::path& path) {
  return model_file_from_json(read_json_file(path));
}

}  // namespace loadseg
