#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "loadseg/binseg.hpp"
#include "loadseg/bootstrap.hpp"
#include "loadseg/ensembles.hpp"
#include "loadseg/load_estimation.hpp"
#include "loadseg/metrics.hpp"
#include "loadseg/model_io.hpp"
#include "loadseg/pipeline.hpp"
#include "loadseg/preprocessing.hpp"
#include "loadseg/split.hpp"
#include "loadseg/synthetic.hpp"
#include "loadseg/thresholding.hpp"

using namespace loadseg;
using namespace loadseg::test;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome outcome(bool pass, std::string detail) { return {pass, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int n, const char* name, double limit_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s > limit_s) {
    o.pass = false;
    o.detail += fmt(" [over %.0f s limit]", limit_s);
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", n, name,
              o.detail.c_str(), s);
  std::fflush(stdout);
}

// ---------------------------------------------------------------- fixtures

std::vector<double> piecewise(Rng& rng, std::size_t n) {
  std::vector<double> z(n);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.005) level = rng.uniform(-3, 3);
    z[i] = level + rng.normal(0, 0.6);
  }
  return z;
}

StationSeries station_from(std::vector<double> s, std::vector<double> b) {
  StationSeries st;
  st.station_id = "fixture";
  st.timestamps = regular_timestamps(s.size());
  st.labels.assign(s.size(), Label::Normal);
  st.s = std::move(s);
  st.b = std::move(b);
  return st;
}

// Score values are multiples of 1/128 in [-9, 9], so each lies on the
// 1/1024 scan grid.
struct ScoreFixture {
  std::vector<ScoreSeries> scores;
  std::vector<CategorizedLabels> labels;
};

ScoreFixture score_fixture(Rng& rng, Polarity pol) {
  ScoreFixture f;
  for (int s = 0; s < 3; ++s) {
    std::vector<std::size_t> lens;
    for (int e = 0; e < 4; ++e) lens.push_back(1 + rng.index(80));
    auto l = labels_with_events(lens, 50);
    l[3] = Label::Uncertain;
    std::vector<double> z(l.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double base = l[i] == Label::Event ? rng.uniform(0.5, 6.0)
                                               : std::abs(rng.normal(0, 1.5));
      double v = std::min(9.0, std::round(base * 128) / 128);
      if (pol == Polarity::ZeroCentered && rng.bernoulli(0.5)) v = -v;
      z[i] = v;
    }
    f.scores.push_back({"s" + std::to_string(s), z, pol});
    f.labels.push_back(categorize(l));
  }
  return f;
}

// ---------------------------------------------------------------- benchmark

constexpr std::uint64_t kBenchmarkSeed = 20240601;

struct Benchmark {
  std::vector<PreparedStation> all;
  SplitData split;
  MethodModel spc, bs, naive, doc, seq;
};

BinsegConfig bs_config(double ql, double qu) {
  BinsegConfig c;
  c.beta = 0.008;
  c.jump = 10;
  c.min_size = 200;
  c.q_lower = ql;
  c.q_upper = qu;
  c.reference_point = ReferencePoint::Mean;
  c.threshold_strategy = ThresholdStrategy::Asymmetrical;
  return c;
}

const Benchmark& benchmark() {
  static const Benchmark b = [] {
    Benchmark out;
    FleetSpec spec;
    std::vector<StationSeries> raw;
    for (auto& s : generate_fleet(spec, kBenchmarkSeed)) raw.push_back(std::move(s.series));
    const auto assignment = stratified_split(raw, kBenchmarkSeed);
    out.all = prepare_stations(raw, PreprocessConfig{});
    out.split = split_stations(out.all, assignment);

    const auto series = series_of(out.split.train);
    const auto labels = labels_of(out.split.train);
    const SpcConfig spc{15, 85, ThresholdStrategy::Symmetrical};
    out.spc = train_single(spc, series, labels, kBenchmarkSeed);
    out.bs = train_single(bs_config(10, 90), series, labels, kBenchmarkSeed);

    EnsembleConfig e;
    e.long_detector = bs_config(10, 90);
    e.short_detector = spc;
    e.strategy = EnsembleStrategy::Naive;
    out.naive = train_ensemble(e, series, labels, kBenchmarkSeed);
    e.strategy = EnsembleStrategy::Doc;
    out.doc = train_ensemble(e, series, labels, kBenchmarkSeed);
    e.strategy = EnsembleStrategy::Sequential;
    e.long_detector = bs_config(15, 85);
    e.short_detector = SpcConfig{10, 90, ThresholdStrategy::Symmetrical};
    out.seq = train_ensemble(e, series, labels, kBenchmarkSeed);
    return out;
  }();
  return b;
}

std::vector<PredictionSeries> predict(const MethodModel& m,
                                      std::span<const PreparedStation> stations) {
  std::vector<PredictionSeries> out;
  for (const auto& s : stations) out.push_back(apply_method(m, s.series).predictions);
  return out;
}

DatasetMetrics test_metrics(const MethodModel& m) {
  const auto& test = benchmark().split.test;
  return dataset_metrics(labels_of(test), predict(m, test));
}

double recall(const CategorizedLabels& l, const PredictionSeries& p, LengthCategory c) {
  const auto k = category_confusion(l, p.predictions, c);
  return static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
}

bool same(const BootstrapSummary& a, const BootstrapSummary& b) {
  const auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.metric == b.metric && eq(a.mean, b.mean) && eq(a.std, b.std) &&
         a.iterations == b.iterations;
}

std::vector<const BootstrapSummary*> summaries(const MetricsBootstrap& m) {
  std::vector<const BootstrapSummary*> v{&m.average_precision, &m.average_recall,
                                         &m.average_f_beta};
  for (std::size_t c = 0; c < kNumCategories; ++c)
    for (const auto* a : {&m.precision, &m.recall, &m.f_beta}) v.push_back(&(*a)[c]);
  return v;
}

const json kSpcModel = json::parse(R"({
  "ensemble": null,
  "primary": {
    "detector": {"type": "spc", "q_lower": 15, "q_upper": 85,
                 "threshold_strategy": "symmetrical"},
    "thresholds": {"type": "symmetrical", "theta": 2.496898},
    "seed": 0
  }
})");

const json kBsModel = json::parse(R"({
  "ensemble": null,
  "primary": {
    "detector": {"type": "binseg", "beta": 0.008, "jump": 10, "min_size": 200,
                 "q_lower": 10, "q_upper": 90, "reference_point": "mean",
                 "threshold_strategy": "asymmetrical"},
    "thresholds": {"type": "asymmetrical", "lower": -0.4082615619841653,
                   "upper": 0.6558452085588331},
    "seed": 0
  }
})");

}  // namespace

int main() {
  criterion(1, "f-beta-formula", 1, [] {
    const double got = f_beta(1.0, 0.5);
    bool ok = std::abs(got - 0.5909090909090909) <= 1e-12 &&
              std::abs(got - f_beta_oracle(1.0, 0.5, 1.5)) <= 1e-12;
    Rng rng(1);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
      const double x = rng.uniform(1e-9, 1.0);
      if (std::abs(f_beta(x, x) - x) > 1e-12) ++bad;
    }
    return outcome(ok && bad == 0, fmt("F(1,0.5)=%.15f fixed-point misses=%d", got, bad));
  });

  criterion(2, "category-boundaries", 1, [] {
    const std::vector<std::size_t> len{24, 25, 288, 289, 4032, 4033};
    const std::vector<LengthCategory> want{LengthCategory::C1, LengthCategory::C2,
                                           LengthCategory::C2, LengthCategory::C3,
                                           LengthCategory::C3, LengthCategory::C4};
    std::string got;
    bool ok = true;
    for (std::size_t k = 0; k < len.size(); ++k) {
      const auto c = category_for_length(len[k]);
      ok &= c == want[k];
      got += std::string(to_string(c)) + " ";
    }
    return outcome(ok, got);
  });

  criterion(3, "binseg-first-split", 30, [] {
    Rng rng(3);
    int mismatches = 0;
    for (int t = 0; t < 50; ++t) {
      const auto z = piecewise(rng, 100 + rng.index(1901));
      const auto got = best_split(z, 0, z.size(), 50, 5);
      const auto want = split_oracle(z, 0, z.size(), 50, 5);
      if (got.has_value() != want.has_value() || (got && got->index != want->index))
        ++mismatches;
    }
    return outcome(mismatches == 0, fmt("index mismatches=%d/50", mismatches));
  });

  criterion(4, "threshold-optimizer", 30, [] {
    Rng rng(4);
    double worst = 0.0;
    int reeval_bad = 0;
    for (int t = 0; t < 20; ++t) {
      const auto pol = t % 2 ? Polarity::NonNegative : Polarity::ZeroCentered;
      const auto f = score_fixture(rng, pol);
      OptimizeOptions o;
      o.max_side_candidates = 100000;
      const auto r = optimize_thresholds(f.scores, f.labels, o);
      std::vector<std::vector<double>> raw;
      for (const auto& s : f.scores) raw.push_back(s.scores);
      double scan = 0.0;
      for (int i = 0; i <= 10000; ++i) {
        const double th = i / 1024.0;
        scan = std::max(scan, average_f_oracle(raw, f.labels,
                                               [&](double z) { return std::abs(z) >= th; }));
      }
      worst = std::max(worst, std::abs(r.achieved - scan));
      if (evaluate_thresholds(f.scores, f.labels, r.threshold_set).average_f_beta != r.achieved)
        ++reeval_bad;
    }
    return outcome(worst <= 1e-12 && reeval_bad == 0,
                   fmt("max |achieved-scan|=%.3g re-eval mismatches=%d", worst, reeval_bad));
  });

  criterion(5, "metric-exclusion-rule", 1, [] {
    std::vector<Label> labels = labels_from({0, 0, 0, 0, 1, 0, 5, 5, 0, 0});
    labels.insert(labels.end(), 30, Label::Event);
    std::vector<std::uint8_t> pred(labels.size(), 0);
    for (int i : {1, 4, 6, 7, 9}) pred[i] = 1;
    for (int i = 10; i < 22; ++i) pred[i] = 1;
    const auto cat = categorize(labels);
    const auto c1 = category_confusion(cat, pred, LengthCategory::C1);
    const auto c2 = category_confusion(cat, pred, LengthCategory::C2);
    const bool ok = c1 == Confusion{1, 2, 0} && c2 == Confusion{12, 2, 18} && c1.fp == c2.fp;
    return outcome(ok, fmt("C1=(%zu,%zu,%zu) C2=(%zu,%zu,%zu)", c1.tp, c1.fp, c1.fn, c2.tp,
                           c2.fp, c2.fn));
  });

  criterion(6, "preprocessing-round-trip", 1, [] {
    const std::size_t n = 500;
    std::vector<double> s(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = 100.0 + 0.7 * i + std::sin(0.1 * i);
      b[i] = 2 * s[i] + 10;
    }
    const auto r = preprocess(station_from(s, b));
    double worst = 0.0;
    for (double d : r.series.delta) worst = std::max(worst, std::abs(d));
    const bool fit_ok = worst < 1e-6 * *std::max_element(s.begin(), s.end()) &&
                        !r.sign_corrected;

    // Unsigned S with a brief export period; B keeps the sign.
    std::vector<double> truth(400), us(400), ub(400);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      truth[i] = 1500.0 + 400.0 * std::sin(2 * M_PI * i / 100.0) + 0.01 * i;
      if (i >= 100 && i < 120) truth[i] = -20.0 - 0.5 * i;
      us[i] = std::abs(truth[i]);
      ub[i] = 0.8 * truth[i];
    }
    const bool fires = preprocess(station_from(us, ub)).sign_corrected;
    const bool signed_quiet = !preprocess(station_from(truth, truth)).sign_corrected;
    const bool positive_quiet = !preprocess(station_from(s, s)).sign_corrected;
    return outcome(fit_ok && fires && signed_quiet && positive_quiet,
                   fmt("m=%.12g c=%.9g max|delta|=%.3g sign-branch(unsigned,signed,positive)="
                       "%d%d%d",
                       r.fit.slope, r.fit.offset, worst, fires, !signed_quiet, !positive_quiet));
  });

  criterion(7, "qualitative-ordering", 300, [] {
    const auto& b = benchmark();
    const auto spc = test_metrics(b.spc);
    const auto bs = test_metrics(b.bs);
    const auto naive = test_metrics(b.naive);
    const auto doc = test_metrics(b.doc);
    const auto seq = test_metrics(b.seq);
    const double bs_c1 = bs.categories[0].f_beta, bs_c4 = bs.categories[3].f_beta;
    const double spc_c1 = spc.categories[0].f_beta;
    const double rival = std::max({naive.average_f_beta, doc.average_f_beta,
                                   bs.average_f_beta, spc.average_f_beta});
    const bool ok = bs_c4 > bs_c1 && spc_c1 > bs_c1 && seq.average_f_beta >= rival - 0.02;
    return outcome(ok, fmt("BS C4=%.3f C1=%.3f SPC C1=%.3f seq avg=%.3f best other=%.3f "
                           "(spc %.3f bs %.3f naive %.3f doc %.3f)",
                           bs_c4, bs_c1, spc_c1, seq.average_f_beta, rival,
                           spc.average_f_beta, bs.average_f_beta, naive.average_f_beta,
                           doc.average_f_beta));
  });

  criterion(8, "or-ensemble-recall", 60, [] {
    const auto& b = benchmark();
    const auto naive = predict(b.naive, b.all);
    const auto spc = predict(b.spc, b.all);
    const auto bs = predict(b.bs, b.all);
    int checked = 0, violations = 0;
    for (std::size_t k = 0; k < b.all.size(); ++k) {
      const auto& l = b.all[k].labels;
      for (auto c : kAllCategories) {
        const auto base = category_confusion(l, naive[k].predictions, c);
        if (base.tp + base.fn == 0) continue;
        ++checked;
        if (recall(l, naive[k], c) < std::max(recall(l, spc[k], c), recall(l, bs[k], c)))
          ++violations;
      }
    }
    return outcome(violations == 0 && checked > 0,
                   fmt("station-category pairs=%d violations=%d", checked, violations));
  });

  criterion(9, "load-estimation-value", 60, [] {
    const auto& b = benchmark();
    const auto cmp = compare_load_estimates(b.all, predict(b.seq, b.all));
    int inflated = 0;
    for (std::size_t k = 0; k < cmp.predicted.size(); ++k)
      if (cmp.unfiltered[k].max_load < cmp.predicted[k].max_load) ++inflated;
    const auto& f = cmp.predicted_errors;
    const auto& u = cmp.unfiltered_errors;
    const bool ok = f.max.fraction_within_margin > u.max.fraction_within_margin &&
                    f.min.fraction_within_margin > u.min.fraction_within_margin &&
                    inflated == 0;
    return outcome(ok, fmt("within 10%% max %.3f vs %.3f, min %.3f vs %.3f (filtered vs "
                           "unfiltered, %zu stations, %zu fully filtered) max-order "
                           "violations=%d",
                           f.max.fraction_within_margin, u.max.fraction_within_margin,
                           f.min.fraction_within_margin, u.min.fraction_within_margin,
                           cmp.predicted.size(), cmp.fully_filtered.size(), inflated));
  });

  criterion(10, "bootstrap-determinism", 120, [] {
    const auto& b = benchmark();
    const auto preds = predict(b.seq, b.split.test);
    std::vector<ConfusionTable> tables;
    for (std::size_t k = 0; k < preds.size(); ++k)
      tables.push_back(confusion_table(b.split.test[k].labels, preds[k].predictions));
    const auto x = bootstrap_metrics(tables, 10000, 99);
    const auto y = bootstrap_metrics(tables, 10000, 99);
    const auto sx = summaries(x), sy = summaries(y);
    bool identical = true;
    for (std::size_t k = 0; k < sx.size(); ++k) identical &= same(*sx[k], *sy[k]);

    const auto one = bootstrap_metrics(std::span(tables).first(1), 10000, 99);
    bool zero = true;
    for (const auto* s : summaries(one)) zero &= s->std == 0.0 || std::isnan(s->mean);
    zero &= !std::isnan(one.average_f_beta.mean);
    return outcome(identical && zero,
                   fmt("identical=%d single-station std zero=%d avg F mean=%.4f std=%.4f",
                       identical, zero, x.average_f_beta.mean, x.average_f_beta.std));
  });

  criterion(11, "auc-oracle", 10, [] {
    Rng rng(11);
    double worst = 0.0;
    for (int f = 0; f < 20; ++f) {
      std::vector<double> pos(1 + rng.index(300)), neg(1 + rng.index(300));
      for (auto& x : pos) x = std::round(rng.uniform(0, 20)) / 4;
      for (auto& x : neg) x = std::round(rng.uniform(-4, 16)) / 4;
      worst = std::max(worst, std::abs(*rank_auc(pos, neg) - auc_oracle(pos, neg)));
    }
    return outcome(worst <= 1e-12, fmt("max |rank-pairs|=%.3g", worst));
  });

  criterion(12, "published-operating-points", 1, [] {
    const auto dir = std::filesystem::temp_directory_path() / "loadseg_acceptance";
    std::filesystem::create_directories(dir);
    const json file = {{"format", "loadseg-model"},
                       {"version", 1},
                       {"beta", 1.5},
                       {"methods",
                        {{{"name", "spc"}, {"model", kSpcModel}},
                         {{"name", "binseg"}, {"model", kBsModel}}}}};
    write_json_file(dir / "model.json", file);
    const auto models = load_model_file(dir / "model.json");
    std::filesystem::remove_all(dir);

    SyntheticSpec spec;
    spec.length = 3000;
    spec.spikes.count = 4;
    spec.short_events.count = 1;
    const auto st = prepare_station(generate_synthetic(spec, 12).series, PreprocessConfig{});
    std::size_t flagged = 0;
    for (const auto& m : models.methods) {
      const auto out = apply_method(m.model, st.series);
      flagged += std::count(out.predictions.predictions.begin(),
                            out.predictions.predictions.end(), 1);
      load_estimate(st.series, out.predictions);
    }

    const auto& th = std::get<AsymmetricThreshold>(models.methods[1].model.primary.thresholds);
    const double lo = th.lower, hi = th.upper;
    const ScoreSeries crafted{"crafted",
                              {std::nextafter(lo, -kInf), lo, std::nextafter(lo, kInf),
                               std::nextafter(hi, -kInf), hi, std::nextafter(hi, kInf)},
                              Polarity::ZeroCentered};
    const auto p = apply_thresholds(crafted, models.methods[1].model.primary.thresholds);
    const std::vector<std::uint8_t> want{1, 0, 0, 0, 1, 1};
    const auto theta = std::get<SymmetricThreshold>(models.methods[0].model.primary.thresholds);
    const bool ok = p.predictions == want && theta.theta == 2.496898 &&
                    lo == -0.4082615619841653 && hi == 0.6558452085588331;
    std::string bits;
    for (auto v : p.predictions) bits += static_cast<char>('0' + v);
    return outcome(ok, fmt("crafted=%s theta=%.6f annotated flagged=%zu", bits.c_str(),
                           theta.theta, flagged));
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
