#include "shepherd/config.hpp"

#include <cmath>

namespace shepherd {
namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("invalid field '" + field + "': " + what);
}

bool finite(double v) { return std::isfinite(v); }

void check_gains(const GainVector& g, const std::string& field) {
  require(finite(g.k1), field + ".k1", "must be finite");
  require(finite(g.k2), field + ".k2", "must be finite");
  require(finite(g.k3), field + ".k3", "must be finite");
  require(finite(g.k4), field + ".k4", "must be finite");
  require(finite(g.sense_radius) && g.sense_radius > 0, field + ".sense_radius", "must be > 0");
}

}  // namespace

WorldConfig default_config(int n_sheep) {
  WorldConfig cfg;
  cfg.n_sheep = n_sheep;
  cfg.kind_assignment.assign(static_cast<std::size_t>(std::max(n_sheep, 0)), SheepKind::normal());
  return cfg;
}

void validate(const WorldConfig& cfg) {
  require(cfg.n_sheep >= 1, "n_sheep", "must be a positive integer");
  check_gains(cfg.base_gains, "base_gains");
  require(cfg.kind_assignment.size() == static_cast<std::size_t>(cfg.n_sheep), "kind_assignment",
          "length must equal n_sheep");
  for (std::size_t i = 0; i < cfg.kind_assignment.size(); ++i) {
    const auto& kind = cfg.kind_assignment[i];
    require(kind.mask <= kNormalMask, "kind_assignment[" + std::to_string(i) + "].mask",
            "must be a 4-bit mask");
    require(finite(kind.scale), "kind_assignment[" + std::to_string(i) + "].scale",
            "must be finite");
  }
  require(is_finite(cfg.goal_center), "goal_center", "must be finite");
  require(finite(cfg.goal_radius) && cfg.goal_radius > 0, "goal_radius", "must be > 0");
  require(cfg.time_limit >= 1, "time_limit", "must be >= 1");
  require(finite(cfg.sheep_speed_cap) && cfg.sheep_speed_cap > 0, "sheep_speed_cap", "must be > 0");
  require(finite(cfg.shepherd_speed_cap) && cfg.shepherd_speed_cap > 0, "shepherd_speed_cap",
          "must be > 0");
  require(finite(cfg.norm_floor) && cfg.norm_floor > 0, "norm_floor", "must be > 0");
  require(finite(cfg.shepherd_gains.kd1), "shepherd_gains.kd1", "must be finite");
  require(finite(cfg.shepherd_gains.kd2), "shepherd_gains.kd2", "must be finite");
  require(finite(cfg.shepherd_gains.kd3), "shepherd_gains.kd3", "must be finite");
  require(is_finite(cfg.init_region.min) && is_finite(cfg.init_region.max) &&
              cfg.init_region.min.x <= cfg.init_region.max.x &&
              cfg.init_region.min.y <= cfg.init_region.max.y,
          "init_region", "min must be <= max and finite");
  require(is_finite(cfg.shepherd_init), "shepherd_init", "must be finite");
  require(cfg.rng_algorithm == kRngAlgorithm, "rng_algorithm",
          std::string("only '") + kRngAlgorithm + "' is supported");

  const auto& p = cfg.policy;
  if (p.proximity_threshold) {
    require(finite(*p.proximity_threshold) && *p.proximity_threshold > 0,
            "policy.proximity_threshold", "must be > 0");
  }
  require(finite(p.hysteresis) && p.hysteresis >= 0, "policy.hysteresis", "must be >= 0");
  const auto& c = p.classifier;
  require(c.observation_period >= 1, "policy.classifier.observation_period", "must be >= 1");
  if (c.estimated_gains) check_gains(*c.estimated_gains, "policy.classifier.estimated_gains");
  require(finite(c.threshold_rule.value) && c.threshold_rule.value > 0, "policy.classifier.threshold_rule",
          "must be > 0");
  require(finite(c.abs_floor) && c.abs_floor >= 0, "policy.classifier.abs_floor", "must be >= 0");
}

std::vector<GainVector> effective_gains(const WorldConfig& cfg) {
  std::vector<GainVector> out;
  out.reserve(cfg.kind_assignment.size());
  for (const auto& kind : cfg.kind_assignment) out.push_back(effective_gains(cfg.base_gains, kind));
  return out;
}

double proximity_threshold(const WorldConfig& cfg) {
  return cfg.policy.proximity_threshold.value_or(cfg.base_gains.sense_radius);
}

GainVector estimated_gains(const WorldConfig& cfg) {
  return cfg.policy.classifier.estimated_gains.value_or(cfg.base_gains);
}

const char* to_string(PolicyType type) {
  switch (type) {
    case PolicyType::kFat: return "fat";
    case PolicyType::kCollectThenGuide: return "collect_then_guide";
    case PolicyType::kClassifyAndGuide: return "classify_and_guide";
  }
  return "?";
}

const char* to_string(CollectOrder order) {
  return order == CollectOrder::kFarthestFromGoal ? "farthest_from_goal" : "lowest_index";
}

const char* to_string(ScoreSubset subset) {
  return subset == ScoreSubset::kAll ? "all" : "normal_only";
}

const char* to_string(ThresholdKind kind) {
  return kind == ThresholdKind::kAdaptive ? "adaptive" : "fixed";
}

PolicyType policy_type_from_string(const std::string& s) {
  if (s == "fat") return PolicyType::kFat;
  if (s == "collect_then_guide") return PolicyType::kCollectThenGuide;
  if (s == "classify_and_guide") return PolicyType::kClassifyAndGuide;
  throw ConfigError("invalid field 'policy.type': unknown policy '" + s + "'");
}

}  // namespace shepherd
