#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shepherd/classifier.hpp"
#include "shepherd/config.hpp"
#include "shepherd/model.hpp"

namespace shepherd {

class InitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One classifier acquisition entry.
struct LabelRecord {
  std::int64_t k = 0;
  std::size_t sheep_id = 0;
  double error = 0.0;
  Label label = Label::kNormal;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

/// Positions of every agent at time k, as seen before the step at k is applied.
struct Frame {
  std::int64_t k = 0;
  std::vector<Vec2> sheep_pos;
  Vec2 shepherd_pos;
  std::vector<Label> labels;  // empty unless the classifier is active

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct TrialOptions {
  bool record_trajectory = false;
  bool record_labels = false;
};

struct TrialResult {
  bool success = false;
  std::int64_t steps_used = 0;
  WorldState final_state;
  std::vector<LabelRecord> label_history;
  std::vector<Frame> trajectory;
  std::vector<Label> final_labels;  // empty unless the classifier is active
  std::int64_t policy_failures = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Uniform placement over init_region using a counter-based generator seeded
/// with rng_seed. Sheep closer than norm_floor to an earlier one are redrawn.
WorldState init_world(const WorldConfig& cfg);

/// Every scored sheep lies within goal_radius of goal_center (inclusive).
/// Under normal_only only true-normal sheep are scored; a flock without any
/// normal sheep is scored in full.
bool success_condition(const WorldState& state, const WorldConfig& cfg);

/// Runs the policy selected in cfg.policy.
TrialResult run_trial(const WorldConfig& cfg, const TrialOptions& options = {});

/// Same as above but starting from `initial` instead of a seeded placement.
TrialResult run_trial(const WorldConfig& cfg, const WorldState& initial,
                      const TrialOptions& options = {});

/// Shepherd movement supplied by the caller for each step; used to replay
/// recorded shepherd paths.
using ShepherdController = std::function<Vec2(const WorldState&)>;

TrialResult run_trial(const WorldConfig& cfg, const ShepherdController& controller,
                      const TrialOptions& options = {});

}  // namespace shepherd
