#include "loadseg/grid.hpp"

#include <set>

#include "loadseg/errors.hpp"
#include "loadseg/model_io.hpp"

namespace loadseg {

using nlohmann::json;

std::vector<SpcConfig> expand(const SpcGrid& g) {
  std::vector<SpcConfig> out;
  for (const auto& [lo, hi] : g.quantiles)
    for (auto ts : g.threshold_strategies) out.push_back({lo, hi, ts});
  return out;
}

std::vector<IfConfig> expand(const IfGrid& g) {
  std::vector<IfConfig> out;
  for (int n : g.n_estimators) {
    if (g.per_station) out.push_back({n, false, 15.0, 85.0, g.max_samples});
    for (const auto& [lo, hi] : g.pooled_quantiles)
      out.push_back({n, true, lo, hi, g.max_samples});
  }
  return out;
}

std::vector<BinsegConfig> expand(const BinsegGrid& g) {
  std::vector<BinsegConfig> out;
  for (double beta : g.beta)
    for (auto l : g.min_size)
      for (auto j : g.jump)
        for (const auto& [lo, hi] : g.quantiles)
          for (auto pen : g.penalty)
            for (auto ref : g.reference_points)
              for (auto ts : g.threshold_strategies)
                out.push_back(
                    {beta, l, j, SegmentCost::L1, pen, lo, hi, ref, ts});
  return out;
}

std::string_view to_string(MethodFamily m) {
  switch (m) {
    case MethodFamily::Spc:
      return "spc";
    case MethodFamily::IsolationForest:
      return "if";
    case MethodFamily::Binseg:
      return "bs";
    case MethodFamily::NaiveBsSpc:
      return "naive_bs_spc";
    case MethodFamily::NaiveBsIf:
      return "naive_bs_if";
    case MethodFamily::DocBsSpc:
      return "doc_bs_spc";
    case MethodFamily::DocBsIf:
      return "doc_bs_if";
    case MethodFamily::SequentialBsSpc:
      return "sequential_bs_spc";
    case MethodFamily::SequentialBsIf:
      return "sequential_bs_if";
  }
  return "?";
}

MethodFamily method_family_from_string(std::string_view s) {
  for (auto m : kAllMethodFamilies)
    if (to_string(m) == s) return m;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

std::optional<EnsembleStrategy> ensemble_of(MethodFamily m) {
  switch (m) {
    case MethodFamily::NaiveBsSpc:
    case MethodFamily::NaiveBsIf:
      return EnsembleStrategy::Naive;
    case MethodFamily::DocBsSpc:
    case MethodFamily::DocBsIf:
      return EnsembleStrategy::Doc;
    case MethodFamily::SequentialBsSpc:
    case MethodFamily::SequentialBsIf:
      return EnsembleStrategy::Sequential;
    default:
      return std::nullopt;
  }
}

bool uses_isolation_forest(MethodFamily m) {
  return m == MethodFamily::IsolationForest || m == MethodFamily::NaiveBsIf ||
         m == MethodFamily::DocBsIf || m == MethodFamily::SequentialBsIf;
}

json Candidate::to_json() const {
  if (ensemble) return loadseg::to_json(*ensemble);
  return loadseg::to_json(single);
}

std::vector<Candidate> candidates(MethodFamily m, const GridSpec& grid) {
  std::vector<Candidate> out;
  switch (m) {
    case MethodFamily::Spc:
      for (const auto& c : expand(grid.spc)) out.push_back({m, c, std::nullopt});
      return out;
    case MethodFamily::IsolationForest:
      for (const auto& c : expand(grid.isolation_forest))
        out.push_back({m, c, std::nullopt});
      return out;
    case MethodFamily::Binseg:
      for (const auto& c : expand(grid.binseg))
        out.push_back({m, c, std::nullopt});
      return out;
    default:
      break;
  }
  const auto longs = expand(grid.ensemble_binseg.value_or(grid.binseg));
  std::vector<ShortDetectorConfig> shorts;
  if (uses_isolation_forest(m)) {
    for (const auto& c :
         expand(grid.ensemble_isolation_forest.value_or(grid.isolation_forest)))
      shorts.emplace_back(c);
  } else {
    for (const auto& c : expand(grid.ensemble_spc.value_or(grid.spc)))
      shorts.emplace_back(c);
  }
  for (const auto& l : longs)
    for (const auto& s : shorts) {
      EnsembleConfig e;
      e.strategy = *ensemble_of(m);
      e.long_detector = l;
      e.short_detector = s;
      out.push_back({m, l, e});
    }
  return out;
}

namespace {

json quantiles_json(const std::vector<QuantilePair>& q) {
  json a = json::array();
  for (const auto& [lo, hi] : q) a.push_back({lo, hi});
  return a;
}

std::vector<QuantilePair> quantiles_from(const json& j) {
  std::vector<QuantilePair> out;
  if (!j.is_array()) throw ConfigError("grid: quantiles must be a list of pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number())
      throw ConfigError("grid: quantile entries must be [lower, upper]");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(what + ": unknown key '" + k + "'");
}

template <typename T>
void read_list(const json& j, const char* key, std::vector<T>& out,
               const std::string& what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<std::vector<T>>();
  } catch (const json::exception&) {
    throw ConfigError(what + ": bad value for '" + key + "'");
  }
  if (out.empty()) throw ConfigError(what + ": '" + key + "' is empty");
}

std::vector<ThresholdStrategy> strategies_from(const json& j) {
  std::vector<ThresholdStrategy> out;
  for (const auto& s : j.get<std::vector<std::string>>())
    out.push_back(threshold_strategy_from_string(s));
  if (out.empty()) throw ConfigError("grid: empty threshold strategy list");
  return out;
}

json strategies_json(const std::vector<ThresholdStrategy>& v) {
  json a = json::array();
  for (auto s : v) a.push_back(to_string(s));
  return a;
}

json spc_json(const SpcGrid& g) {
  return {{"quantiles", quantiles_json(g.quantiles)},
          {"threshold_strategies", strategies_json(g.threshold_strategies)}};
}

SpcGrid spc_from(const json& j) {
  check_keys(j, {"quantiles", "threshold_strategies"}, "spc grid");
  SpcGrid g;
  if (j.contains("quantiles")) g.quantiles = quantiles_from(j.at("quantiles"));
  if (j.contains("threshold_strategies"))
    g.threshold_strategies = strategies_from(j.at("threshold_strategies"));
  return g;
}

json if_json(const IfGrid& g) {
  return {{"n_estimators", g.n_estimators},
          {"max_samples", g.max_samples},
          {"per_station", g.per_station},
          {"pooled_quantiles", quantiles_json(g.pooled_quantiles)}};
}

IfGrid if_from(const json& j) {
  const std::string what = "isolation forest grid";
  check_keys(j, {"n_estimators", "max_samples", "per_station", "pooled_quantiles"},
             what);
  IfGrid g;
  read_list(j, "n_estimators", g.n_estimators, what);
  if (j.contains("max_samples")) g.max_samples = j.at("max_samples").get<int>();
  if (j.contains("per_station")) g.per_station = j.at("per_station").get<bool>();
  if (j.contains("pooled_quantiles"))
    g.pooled_quantiles = quantiles_from(j.at("pooled_quantiles"));
  return g;
}

json binseg_json(const BinsegGrid& g) {
  json pen = json::array(), refs = json::array();
  for (auto p : g.penalty) pen.push_back(to_string(p));
  for (auto r : g.reference_points) refs.push_back(to_string(r));
  return {{"beta", g.beta},
          {"min_size", g.min_size},
          {"jump", g.jump},
          {"quantiles", quantiles_json(g.quantiles)},
          {"penalty", pen},
          {"reference_points", refs},
          {"threshold_strategies", strategies_json(g.threshold_strategies)}};
}

BinsegGrid binseg_from(const json& j) {
  const std::string what = "binseg grid";
  check_keys(j,
             {"beta", "min_size", "jump", "quantiles", "penalty",
              "reference_points", "threshold_strategies", "cost"},
             what);
  BinsegGrid g;
  read_list(j, "beta", g.beta, what);
  read_list(j, "min_size", g.min_size, what);
  read_list(j, "jump", g.jump, what);
  if (j.contains("quantiles")) g.quantiles = quantiles_from(j.at("quantiles"));
  if (j.contains("penalty")) {
    g.penalty.clear();
    for (const auto& s : j.at("penalty").get<std::vector<std::string>>())
      g.penalty.push_back(penalty_scaling_from_string(s));
  }
  if (j.contains("reference_points")) {
    g.reference_points.clear();
    for (const auto& s : j.at("reference_points").get<std::vector<std::string>>())
      g.reference_points.push_back(reference_point_from_string(s));
  }
  if (j.contains("threshold_strategies"))
    g.threshold_strategies = strategies_from(j.at("threshold_strategies"));
  if (j.contains("cost"))
    for (const auto& c : j.at("cost").get<std::vector<std::string>>())
      if (c != "l1" && c != "L1")
        throw ConfigError("binseg grid: unsupported cost '" + c + "'");
  return g;
}

}  // namespace

json to_json(const GridSpec& g) {
  json j = {{"spc", spc_json(g.spc)},
            {"isolation_forest", if_json(g.isolation_forest)},
            {"binseg", binseg_json(g.binseg)}};
  if (g.ensemble_binseg) j["ensemble_binseg"] = binseg_json(*g.ensemble_binseg);
  if (g.ensemble_spc) j["ensemble_spc"] = spc_json(*g.ensemble_spc);
  if (g.ensemble_isolation_forest)
    j["ensemble_isolation_forest"] = if_json(*g.ensemble_isolation_forest);
  return j;
}

GridSpec grid_spec_from_json(const json& j) {
  check_keys(j,
             {"spc", "isolation_forest", "binseg", "ensemble_binseg",
              "ensemble_spc", "ensemble_isolation_forest"},
             "grid");
  GridSpec g;
  try {
    if (j.contains("spc")) g.spc = spc_from(j.at("spc"));
    if (j.contains("isolation_forest"))
      g.isolation_forest = if_from(j.at("isolation_forest"));
    if (j.contains("binseg")) g.binseg = binseg_from(j.at("binseg"));
    if (j.contains("ensemble_binseg"))
      g.ensemble_binseg = binseg_from(j.at("ensemble_binseg"));
    if (j.contains("ensemble_spc")) g.ensemble_spc = spc_from(j.at("ensemble_spc"));
    if (j.contains("ensemble_isolation_forest"))
      g.ensemble_isolation_forest = if_from(j.at("ensemble_isolation_forest"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  for (const auto& c : expand(g.spc)) validate(c);
  for (const auto& c : expand(g.isolation_forest)) validate(c);
  for (const auto& c : expand(g.binseg)) validate(c);
  return g;
}

}  // namespace loadseg
