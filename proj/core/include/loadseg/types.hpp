#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace loadseg {

// Seconds since the Unix epoch, UTC. Series are sampled every 15 minutes.
struct Timestamp {
  std::int64_t epoch_seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr std::int64_t kSampleIntervalSeconds = 15 * 60;

// Ground-truth mark for one sample. Uncertain samples never take part in
// metrics.
enum class Label : std::uint8_t { Normal = 0, Event = 1, Uncertain = 5 };

std::optional<Label> label_from_int(long value);
inline int to_int(Label l) { return static_cast<int>(l); }

// Event-length bins in samples: C1=[1,24], C2=[25,288], C3=[289,4032],
// C4=[4033,inf). At 15-minute resolution these are 6h, 3d and 42d.
enum class LengthCategory : std::uint8_t { C1 = 0, C2 = 1, C3 = 2, C4 = 3 };

inline constexpr std::size_t kNumCategories = 4;
inline constexpr std::array<LengthCategory, kNumCategories> kAllCategories = {
    LengthCategory::C1, LengthCategory::C2, LengthCategory::C3,
    LengthCategory::C4};

inline constexpr std::size_t index_of(LengthCategory c) {
  return static_cast<std::size_t>(c);
}

LengthCategory category_for_length(std::size_t length);
std::string_view to_string(LengthCategory c);
// Accepts "C1".."C4".
std::optional<LengthCategory> category_from_string(std::string_view s);

class CategorySet {
 public:
  constexpr CategorySet() = default;
  constexpr CategorySet(std::initializer_list<LengthCategory> cats) {
    for (auto c : cats) bits_ |= bit(c);
  }

  static constexpr CategorySet all() {
    return {LengthCategory::C1, LengthCategory::C2, LengthCategory::C3,
            LengthCategory::C4};
  }
  static constexpr CategorySet long_events() {
    return {LengthCategory::C3, LengthCategory::C4};
  }
  static constexpr CategorySet short_events() {
    return {LengthCategory::C1, LengthCategory::C2};
  }

  constexpr bool contains(LengthCategory c) const { return bits_ & bit(c); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr void insert(LengthCategory c) { bits_ |= bit(c); }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(CategorySet, CategorySet) = default;

 private:
  static constexpr std::uint8_t bit(LengthCategory c) {
    return static_cast<std::uint8_t>(1u << index_of(c));
  }
  std::uint8_t bits_ = 0;
};

std::vector<std::string> to_strings(CategorySet set);
CategorySet category_set_from_strings(const std::vector<std::string>& names);

// Raw station measurements, one entry per 15-minute sample. `s` may contain
// NaN for missing measurements; `b` may contain NaN for missing bottom-up
// values. Both are removed during preprocessing.
struct StationSeries {
  std::string station_id;
  std::vector<Timestamp> timestamps;
  std::vector<double> s;
  std::vector<double> b;
  std::vector<Label> labels;
  bool sign_capable = false;

  std::size_t size() const { return timestamps.size(); }
  // Throws DataError when lengths disagree or timestamps are not strictly
  // increasing.
  void validate() const;
};

// Preprocessed residual between signed measurement and rescaled bottom-up.
struct DifferenceSeries {
  std::string station_id;
  std::vector<Timestamp> timestamps;
  std::vector<double> delta;
  std::vector<Label> labels;
  std::vector<double> s_signed;

  std::size_t size() const { return delta.size(); }
  void validate() const;
};

enum class Polarity : std::uint8_t { NonNegative, ZeroCentered };

struct ScoreSeries {
  std::string station_id;
  std::vector<double> scores;
  Polarity polarity = Polarity::ZeroCentered;

  std::size_t size() const { return scores.size(); }
};

struct PredictionSeries {
  std::string station_id;
  std::vector<std::uint8_t> predictions;

  std::size_t size() const { return predictions.size(); }
};

// ---------------------------------------------------------------------------
// Detector configuration

enum class ThresholdStrategy : std::uint8_t { Symmetrical, Asymmetrical };

struct SpcConfig {
  double q_lower = 15.0;
  double q_upper = 85.0;
  ThresholdStrategy threshold_strategy = ThresholdStrategy::Symmetrical;

  friend bool operator==(const SpcConfig&, const SpcConfig&) = default;
};

struct IfConfig {
  int n_estimators = 1000;
  bool pooled = false;
  // Only used when pooled.
  double q_lower = 15.0;
  double q_upper = 85.0;
  // Subsample size cap; the effective size is min(max_samples, n).
  int max_samples = 256;

  friend bool operator==(const IfConfig&, const IfConfig&) = default;
};

enum class SegmentCost : std::uint8_t { L1 };
enum class PenaltyScaling : std::uint8_t { Linear, L1 };
enum class ReferencePoint : std::uint8_t {
  Mean,
  Median,
  LongestMean,
  LongestMedian
};

struct BinsegConfig {
  double beta = 0.008;
  std::size_t min_size = 200;
  std::size_t jump = 10;
  SegmentCost cost = SegmentCost::L1;
  PenaltyScaling penalty = PenaltyScaling::Linear;
  double q_lower = 10.0;
  double q_upper = 90.0;
  ReferencePoint reference_point = ReferencePoint::Mean;
  ThresholdStrategy threshold_strategy = ThresholdStrategy::Asymmetrical;

  friend bool operator==(const BinsegConfig&, const BinsegConfig&) = default;
};

using DetectorConfig = std::variant<SpcConfig, IfConfig, BinsegConfig>;

// Throws ConfigError when an invariant of the configuration is violated.
void validate(const SpcConfig& cfg);
void validate(const IfConfig& cfg);
void validate(const BinsegConfig& cfg);
void validate(const DetectorConfig& cfg);

ThresholdStrategy threshold_strategy_of(const DetectorConfig& cfg);
Polarity polarity_of(const DetectorConfig& cfg);

std::string_view to_string(ThresholdStrategy s);
std::string_view to_string(ReferencePoint r);
std::string_view to_string(PenaltyScaling p);
ThresholdStrategy threshold_strategy_from_string(std::string_view s);
ReferencePoint reference_point_from_string(std::string_view s);
PenaltyScaling penalty_scaling_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Thresholds

struct SymmetricThreshold {
  double theta = 0.0;
  friend bool operator==(const SymmetricThreshold&,
                         const SymmetricThreshold&) = default;
};

struct AsymmetricThreshold {
  double lower = 0.0;
  double upper = 0.0;
  friend bool operator==(const AsymmetricThreshold&,
                         const AsymmetricThreshold&) = default;
};

using ThresholdSet = std::variant<SymmetricThreshold, AsymmetricThreshold>;

}  // namespace loadseg
