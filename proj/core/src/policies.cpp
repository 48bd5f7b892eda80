#include "shepherd/policies.hpp"

#include <cmath>
#include <limits>

namespace shepherd {
namespace {

double dist(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return std::sqrt(d.x * d.x + d.y * d.y);
}

}  // namespace

std::size_t farthest_sheep(const WorldState& state, const Vec2& point,
                           const std::optional<std::vector<std::size_t>>& subset) {
  std::size_t best = 0;
  double best_d = -1.0;
  bool found = false;
  auto consider = [&](std::size_t i) {
    const double d = dist(state.sheep_pos.at(i), point);
    if (!found || d > best_d || (d == best_d && i < best)) {
      best = i;
      best_d = d;
      found = true;
    }
  };
  if (subset) {
    for (std::size_t i : *subset) consider(i);
  } else {
    for (std::size_t i = 0; i < state.n_sheep(); ++i) consider(i);
  }
  if (!found) throw std::invalid_argument("FAT target subset is empty");
  return best;
}

std::size_t nearest_sheep(const WorldState& state) {
  if (state.n_sheep() == 0) throw std::invalid_argument("no sheep in world");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.n_sheep(); ++i) {
    const double d = dist(state.sheep_pos[i], state.shepherd_pos);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

Vec2 fat_force(const WorldState& state, const FatParams& params, const Vec2& goal,
               double norm_floor) {
  const Vec2 target = params.target_point.value_or(goal);
  const std::size_t t = farthest_sheep(state, target, params.target_subset);
  const std::size_t n = nearest_sheep(state);
  const Vec2 xd = state.shepherd_pos;

  const Vec2 toward_target = safe_unit(state.sheep_pos[t] - xd, norm_floor);
  const Vec2 dn = state.sheep_pos[n] - xd;
  const double rn = std::max(std::sqrt(dn.x * dn.x + dn.y * dn.y), norm_floor);
  const Vec2 away_nearest = -(dn / (rn * rn * rn));
  const Vec2 away_goal = -safe_unit(target - xd, norm_floor);

  return params.gains.kd1 * toward_target + params.gains.kd2 * away_nearest +
         params.gains.kd3 * away_goal;
}

Vec2 fat_step(const WorldState& state, const FatParams& params, const Vec2& goal,
              double norm_floor) {
  return clamp_norm(fat_force(state, params, goal, norm_floor), params.speed_cap);
}

FatParams fat_params(const WorldConfig& cfg) {
  FatParams p;
  p.gains = cfg.shepherd_gains;
  p.speed_cap = cfg.shepherd_speed_cap;
  return p;
}

CollectThenGuideState CollectThenGuideState::from_config(const WorldConfig& cfg) {
  CollectThenGuideState s;
  s.proximity_threshold = shepherd::proximity_threshold(cfg);
  s.hysteresis = cfg.policy.hysteresis;
  s.order = cfg.policy.collect_order;
  return s;
}

bool is_unresponsive(const SheepKind& kind) {
  return !kind.receives(kAvoidance) || kind.scale == 0.0;
}

CollectThenGuideOutcome collect_then_guide_step(const WorldState& state,
                                                const CollectThenGuideState& policy,
                                                const WorldConfig& cfg,
                                                std::span<const SheepKind> kinds) {
  if (kinds.size() != state.n_sheep()) {
    throw std::invalid_argument("kind list length differs from sheep count");
  }
  std::vector<std::size_t> responsive;
  std::vector<std::size_t> unresponsive;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    (is_unresponsive(kinds[i]) ? unresponsive : responsive).push_back(i);
  }

  CollectThenGuideOutcome out;
  out.next = policy;
  if (responsive.empty()) {
    out.failure = true;
    return out;
  }

  const double reach = policy.proximity_threshold +
                       (policy.phase == Phase::kGuiding ? policy.hysteresis : 0.0);
  std::optional<std::size_t> chosen;
  double chosen_d = -1.0;
  for (std::size_t u : unresponsive) {
    bool close = false;
    for (std::size_t r : responsive) {
      if (dist(state.sheep_pos[u], state.sheep_pos[r]) <= reach) {
        close = true;
        break;
      }
    }
    if (close) continue;
    if (policy.order == CollectOrder::kLowestIndex) {
      chosen = u;
      break;
    }
    const double d = dist(state.sheep_pos[u], cfg.goal_center);
    if (!chosen || d > chosen_d) {
      chosen = u;
      chosen_d = d;
    }
  }

  FatParams params = fat_params(cfg);
  if (!chosen) {
    out.next.phase = Phase::kGuiding;
  } else {
    out.next.phase = Phase::kCollecting;
    out.next.target_unresponsive = *chosen;
    params.target_point = state.sheep_pos[*chosen];
    params.target_subset = std::move(responsive);
  }
  out.move = fat_step(state, params, cfg.goal_center, cfg.norm_floor);
  return out;
}

ClassifyAndGuideState ClassifyAndGuideState::initial(std::size_t n_sheep) {
  return {ClassifierState::initial(n_sheep)};
}

ClassifyAndGuideOutcome classify_and_guide_step(const WorldState& state,
                                                const ClassifyAndGuideState& policy,
                                                const WorldConfig& cfg) {
  ClassifyAndGuideOutcome out;
  out.next = policy;
  const PredictionModel model{estimated_gains(cfg), cfg.sheep_speed_cap, cfg.norm_floor};
  out.acquired = classifier_tick(state, out.next.classifier, cfg.policy.classifier, model);

  std::vector<std::size_t> normal;
  const auto& labels = out.next.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::kNormal) normal.push_back(i);
  }
  if (normal.empty()) {
    out.failure = true;
    return out;
  }
  FatParams params = fat_params(cfg);
  if (normal.size() != state.n_sheep()) params.target_subset = std::move(normal);
  out.move = fat_step(state, params, cfg.goal_center, cfg.norm_floor);
  return out;
}

}  // namespace shepherd
