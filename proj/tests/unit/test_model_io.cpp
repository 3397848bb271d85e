#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "fixtures.hpp"
#include "loadseg/errors.hpp"
#include "loadseg/model_io.hpp"

using namespace loadseg;
using namespace loadseg::test;
using nlohmann::json;

namespace {

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

TEST(ModelIo, HandWrittenModelsLoad) {
  const auto spc = method_model_from_json(kSpcModel);
  EXPECT_EQ(std::get<SymmetricThreshold>(spc.primary.thresholds).theta, 2.496898);
  EXPECT_EQ(std::get<SpcConfig>(spc.primary.scorer.config).q_lower, 15);
  const auto bs = method_model_from_json(kBsModel);
  const auto& th = std::get<AsymmetricThreshold>(bs.primary.thresholds);
  EXPECT_EQ(th.lower, -0.4082615619841653);
  EXPECT_EQ(th.upper, 0.6558452085588331);
  EXPECT_EQ(std::get<BinsegConfig>(bs.primary.scorer.config).reference_point,
            ReferencePoint::Mean);
}

TEST(ModelIo, RoundTripIsExact) {
  ModelFile f;
  f.methods.push_back({"spc", method_model_from_json(kSpcModel), {{"note", 1}}});
  f.methods.push_back({"bs", method_model_from_json(kBsModel), json::object()});
  const auto text = to_json(f).dump();
  const auto back = model_file_from_json(json::parse(text));
  ASSERT_EQ(back.methods.size(), 2u);
  EXPECT_EQ(back.methods[1].model.primary.thresholds, f.methods[1].model.primary.thresholds);
  EXPECT_EQ(to_json(back).dump(), text);

  const auto dir = std::filesystem::temp_directory_path() / "loadseg_model_io";
  std::filesystem::create_directories(dir);
  save_model_file(dir / "m.json", f);
  EXPECT_EQ(to_json(load_model_file(dir / "m.json")).dump(), text);
  std::filesystem::remove_all(dir);
}

TEST(ModelIo, InfinitiesAsStrings) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(json_number(inf), "inf");
  EXPECT_EQ(json_number(-inf), "-inf");
  EXPECT_EQ(number_from_json(json("inf")), inf);
  EXPECT_EQ(number_from_json(json("-inf")), -inf);
  EXPECT_THROW(number_from_json(json("nan")), ConfigError);
  const ThresholdSet t = AsymmetricThreshold{-inf, 0.5};
  EXPECT_EQ(threshold_set_from_json(to_json(t)), t);
}

TEST(ModelIo, StrictValidation) {
  auto bad_key = kSpcModel;
  bad_key["primary"]["detector"]["q_middle"] = 50;
  EXPECT_THROW(method_model_from_json(bad_key), ConfigError);

  auto bad_pair = kBsModel;
  bad_pair["primary"]["thresholds"]["lower"] = 1.0;
  EXPECT_THROW(method_model_from_json(bad_pair), ConfigError);

  auto negative = kSpcModel;
  negative["primary"]["thresholds"]["theta"] = -1;
  EXPECT_THROW(method_model_from_json(negative), ConfigError);

  auto wrong_rule = kSpcModel;
  wrong_rule["primary"]["detector"]["type"] = "isolation_forest";
  wrong_rule["primary"]["detector"] = {{"type", "isolation_forest"}, {"pooled", false}};
  wrong_rule["primary"]["thresholds"] = kBsModel["primary"]["thresholds"];
  EXPECT_THROW(method_model_from_json(wrong_rule), ConfigError);

  EXPECT_THROW(model_file_from_json({{"format", "other"}}), ConfigError);
  EXPECT_THROW(detector_config_from_json({{"type", "lstm"}}), ConfigError);
}

TEST(ModelIo, DetectorConfigsRoundTrip) {
  BinsegConfig b;
  b.beta = 0.12;
  b.reference_point = ReferencePoint::LongestMedian;
  b.penalty = PenaltyScaling::L1;
  const std::vector<DetectorConfig> configs{SpcConfig{20, 80, ThresholdStrategy::Asymmetrical},
                                            IfConfig{500, true, 10, 90, 128}, b};
  for (const auto& c : configs) EXPECT_EQ(detector_config_from_json(to_json(c)), c);
}

TEST(ModelIo, EnsembleConfigRoundTrip) {
  EnsembleConfig c;
  c.strategy = EnsembleStrategy::Doc;
  c.short_detector = IfConfig{100, false};
  const auto back = ensemble_config_from_json(to_json(c));
  EXPECT_EQ(back.strategy, c.strategy);
  EXPECT_EQ(back.long_detector, c.long_detector);
  EXPECT_EQ(back.short_detector, c.short_detector);
  EXPECT_EQ(back.long_categories, c.long_categories);
}
