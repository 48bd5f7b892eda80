#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shepherd/model.hpp"

namespace shepherd {

/// Raised for any invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShepherdGains {
  double kd1 = 2.0;  // toward the targeted sheep
  double kd2 = 0.5;  // away from the nearest sheep
  double kd3 = 1.0;  // away from the goal

  friend bool operator==(const ShepherdGains&, const ShepherdGains&) = default;
};

/// Axis-aligned rectangle [min.x, max.x] x [min.y, max.y].
struct Rect {
  Vec2 min{0.0, 0.0};
  Vec2 max{22.0, 22.0};

  double area() const { return (max.x - min.x) * (max.y - min.y); }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class PolicyType { kFat, kCollectThenGuide, kClassifyAndGuide };
enum class CollectOrder { kFarthestFromGoal, kLowestIndex };
enum class ScoreSubset { kAll, kNormalOnly };
enum class ThresholdKind { kAdaptive, kFixed };

/// adaptive: theta = max(abs_floor, median + value * MAD); fixed: theta = value.
struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::kAdaptive;
  double value = 3.0;

  friend bool operator==(const ThresholdRule&, const ThresholdRule&) = default;
};

struct ClassifierConfig {
  int observation_period = 1;
  /// Coefficients the shepherd assumes for normal sheep. Unset means the
  /// world's base gains (a correct estimate).
  std::optional<GainVector> estimated_gains;
  ThresholdRule threshold_rule;
  double abs_floor = 1e-6;
  bool latch = true;

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

struct PolicyConfig {
  PolicyType type = PolicyType::kFat;
  /// Collect-then-guide "close" distance; unset means the sensing radius.
  std::optional<double> proximity_threshold;
  CollectOrder collect_order = CollectOrder::kFarthestFromGoal;
  double hysteresis = 0.0;
  ClassifierConfig classifier;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

inline constexpr const char* kRngAlgorithm = "splitmix64-counter-v1";

struct WorldConfig {
  int n_sheep = 10;
  GainVector base_gains;
  std::vector<SheepKind> kind_assignment = std::vector<SheepKind>(10);
  Vec2 goal_center{60.0, 60.0};
  double goal_radius = 10.0;
  std::int64_t time_limit = 4000;
  double sheep_speed_cap = 1.0;
  double shepherd_speed_cap = 1.5;
  double norm_floor = 1e-9;
  ShepherdGains shepherd_gains;
  Rect init_region;
  Vec2 shepherd_init{-5.0, -5.0};
  std::uint64_t rng_seed = 0;
  std::string rng_algorithm = kRngAlgorithm;
  ScoreSubset score_subset = ScoreSubset::kAll;
  PolicyConfig policy;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

/// Default calibration with `n` normal sheep.
WorldConfig default_config(int n_sheep = 10);

/// Throws ConfigError naming the first violated field.
void validate(const WorldConfig& cfg);

/// Per-sheep gains after applying each sheep's kind mask and scale.
std::vector<GainVector> effective_gains(const WorldConfig& cfg);

double proximity_threshold(const WorldConfig& cfg);
GainVector estimated_gains(const WorldConfig& cfg);

const char* to_string(PolicyType type);
const char* to_string(CollectOrder order);
const char* to_string(ScoreSubset subset);
const char* to_string(ThresholdKind kind);
PolicyType policy_type_from_string(const std::string& s);

}  // namespace shepherd
