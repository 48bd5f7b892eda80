#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shepherd/classifier.hpp"
#include "shepherd/config.hpp"
#include "shepherd/model.hpp"

namespace shepherd {

/// Farthest-agent targeting parameters. `target_point` replaces the goal and
/// `target_subset` restricts which sheep may be chosen as the target.
struct FatParams {
  ShepherdGains gains;
  double speed_cap = 1.5;
  std::optional<Vec2> target_point;
  std::optional<std::vector<std::size_t>> target_subset;
};

/// Index of the sheep farthest from `point` among `subset` (all sheep when
/// empty optional); ties resolve to the lowest index. Throws
/// std::invalid_argument on an empty candidate set.
std::size_t farthest_sheep(const WorldState& state, const Vec2& point,
                           const std::optional<std::vector<std::size_t>>& subset);

/// Index of the sheep nearest to the shepherd, lowest index on ties.
std::size_t nearest_sheep(const WorldState& state);

/// Shepherd movement before the speed cap is applied.
Vec2 fat_force(const WorldState& state, const FatParams& params, const Vec2& goal,
               double norm_floor);

/// fat_force clamped to params.speed_cap.
Vec2 fat_step(const WorldState& state, const FatParams& params, const Vec2& goal,
              double norm_floor);

FatParams fat_params(const WorldConfig& cfg);

// --- collect then guide ---

enum class Phase { kCollecting, kGuiding };

struct CollectThenGuideState {
  Phase phase = Phase::kGuiding;
  std::size_t target_unresponsive = 0;  // meaningful while collecting
  double proximity_threshold = 5.0;
  double hysteresis = 0.0;
  CollectOrder order = CollectOrder::kFarthestFromGoal;

  static CollectThenGuideState from_config(const WorldConfig& cfg);
  friend bool operator==(const CollectThenGuideState&, const CollectThenGuideState&) = default;
};

/// A sheep the shepherd cannot repel (no avoidance force).
bool is_unresponsive(const SheepKind& kind);

struct CollectThenGuideOutcome {
  Vec2 move;
  CollectThenGuideState next;
  bool failure = false;  // no responsive sheep: shepherd holds position
};

CollectThenGuideOutcome collect_then_guide_step(const WorldState& state,
                                                const CollectThenGuideState& policy,
                                                const WorldConfig& cfg,
                                                std::span<const SheepKind> kinds);

// --- classify and guide ---

struct ClassifyAndGuideState {
  ClassifierState classifier;

  static ClassifyAndGuideState initial(std::size_t n_sheep);
  const std::vector<Label>& labels() const { return classifier.labels; }
};

struct ClassifyAndGuideOutcome {
  Vec2 move;
  ClassifyAndGuideState next;
  bool acquired = false;  // the classifier refreshed labels this step
  bool failure = false;   // every sheep labeled variant: shepherd holds position
};

ClassifyAndGuideOutcome classify_and_guide_step(const WorldState& state,
                                                const ClassifyAndGuideState& policy,
                                                const WorldConfig& cfg);

}  // namespace shepherd
