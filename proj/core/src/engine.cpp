#include "shepherd/engine.hpp"

#include <cmath>
#include <string>

#include "shepherd/dynamics.hpp"
#include "shepherd/policies.hpp"
#include "shepherd/rng.hpp"

namespace shepherd {
namespace {

constexpr int kMaxRedraws = 1000;

// Checks everything validate() does except the time limit, which run_trial
// accepts down to zero.
void validate_for_run(const WorldConfig& cfg) {
  WorldConfig probe = cfg;
  probe.time_limit = std::max<std::int64_t>(cfg.time_limit, 1);
  validate(probe);
  if (cfg.time_limit < 0) throw ConfigError("invalid field 'time_limit': must be >= 0");
}

// Polymorphism over the three policies plus the scripted controller.
class Stepper {
 public:
  Stepper(const WorldConfig& cfg, const ShepherdController* scripted)
      : cfg_(cfg), scripted_(scripted) {
    if (!scripted_) {
      if (cfg.policy.type == PolicyType::kCollectThenGuide) {
        ctg_ = CollectThenGuideState::from_config(cfg);
      } else if (cfg.policy.type == PolicyType::kClassifyAndGuide) {
        cag_ = ClassifyAndGuideState::initial(static_cast<std::size_t>(cfg.n_sheep));
      }
    }
  }

  bool classifier_active() const { return cag_.has_value(); }
  const std::vector<Label>& labels() const { return cag_->labels(); }
  const ClassifierState& classifier() const { return cag_->classifier; }

  struct Move {
    Vec2 move;
    bool failure = false;
    bool acquired = false;
  };

  Move next(const WorldState& state) {
    if (scripted_) return {(*scripted_)(state)};
    if (ctg_) {
      auto out = collect_then_guide_step(state, *ctg_, cfg_, cfg_.kind_assignment);
      ctg_ = out.next;
      return {out.move, out.failure};
    }
    if (cag_) {
      auto out = classify_and_guide_step(state, *cag_, cfg_);
      cag_ = std::move(out.next);
      return {out.move, out.failure, out.acquired};
    }
    return {fat_step(state, fat_params(cfg_), cfg_.goal_center, cfg_.norm_floor)};
  }

 private:
  const WorldConfig& cfg_;
  const ShepherdController* scripted_;
  std::optional<CollectThenGuideState> ctg_;
  std::optional<ClassifyAndGuideState> cag_;
};

TrialResult run(const WorldConfig& cfg, const ShepherdController* scripted,
                const WorldState* initial, const TrialOptions& options) {
  validate_for_run(cfg);
  TrialResult result;
  WorldState state = initial ? *initial : init_world(cfg);
  if (initial) {
    check_state(state);
    if (state.n_sheep() != static_cast<std::size_t>(cfg.n_sheep)) {
      throw std::invalid_argument("initial state has " + std::to_string(state.n_sheep()) +
                                  " sheep, config expects " + std::to_string(cfg.n_sheep));
    }
  }
  const std::vector<GainVector> gains = effective_gains(cfg);
  Stepper stepper(cfg, scripted);
  std::vector<Vec2> scratch;

  auto record = [&](const WorldState& s) {
    if (!options.record_trajectory) return;
    Frame f{s.k, s.sheep_pos, s.shepherd_pos, {}};
    if (stepper.classifier_active()) f.labels = stepper.labels();
    result.trajectory.push_back(std::move(f));
  };

  bool success = false;
  for (std::int64_t k = 0; k < cfg.time_limit; ++k) {
    if (success_condition(state, cfg)) {
      success = true;
      break;
    }
    const auto move = stepper.next(state);
    if (move.failure) ++result.policy_failures;
    if (move.acquired && options.record_labels) {
      const auto& cls = stepper.classifier();
      for (std::size_t i = 0; i < cls.labels.size(); ++i) {
        result.label_history.push_back({state.k, i, cls.last_errors[i], cls.labels[i]});
      }
    }
    record(state);
    sheep_step_inplace(state, gains, cfg.sheep_speed_cap, cfg.norm_floor, scratch);
    state.shepherd_pos += move.move;
    if (!is_finite(state.shepherd_pos)) {
      throw std::runtime_error("non-finite shepherd position at k=" + std::to_string(state.k));
    }
  }
  if (!success) success = success_condition(state, cfg);
  record(state);

  result.success = success;
  result.steps_used = state.k;
  if (stepper.classifier_active()) result.final_labels = stepper.labels();
  result.final_state = std::move(state);
  return result;
}

}  // namespace

WorldState init_world(const WorldConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.n_sheep);
  CounterRng rng(cfg.rng_seed);
  WorldState state;
  state.sheep_pos.reserve(n);
  const Rect& r = cfg.init_region;
  for (std::size_t i = 0; i < n; ++i) {
    int attempt = 0;
    while (true) {
      const Vec2 p{rng.next_uniform(r.min.x, r.max.x), rng.next_uniform(r.min.y, r.max.y)};
      bool clear = true;
      for (const Vec2& q : state.sheep_pos) {
        if (distance(p, q) < cfg.norm_floor) {
          clear = false;
          break;
        }
      }
      if (clear) {
        state.sheep_pos.push_back(p);
        break;
      }
      if (++attempt >= kMaxRedraws) {
        throw InitError("could not place sheep " + std::to_string(i) + " after " +
                        std::to_string(kMaxRedraws) +
                        " draws; init_region is too small for n_sheep");
      }
    }
  }
  state.sheep_prev_move.assign(n, Vec2{});
  state.shepherd_pos = cfg.shepherd_init;
  state.k = 0;
  return state;
}

bool success_condition(const WorldState& state, const WorldConfig& cfg) {
  bool any_normal = false;
  if (cfg.score_subset == ScoreSubset::kNormalOnly) {
    for (std::size_t i = 0; i < state.n_sheep() && i < cfg.kind_assignment.size(); ++i) {
      any_normal = any_normal || cfg.kind_assignment[i].is_normal();
    }
  }
  for (std::size_t i = 0; i < state.n_sheep(); ++i) {
    if (any_normal && !cfg.kind_assignment[i].is_normal()) continue;
    if (distance(state.sheep_pos[i], cfg.goal_center) > cfg.goal_radius) return false;
  }
  return true;
}

TrialResult run_trial(const WorldConfig& cfg, const TrialOptions& options) {
  return run(cfg, nullptr, nullptr, options);
}

TrialResult run_trial(const WorldConfig& cfg, const WorldState& initial,
                      const TrialOptions& options) {
  return run(cfg, nullptr, &initial, options);
}

TrialResult run_trial(const WorldConfig& cfg, const ShepherdController& controller,
                      const TrialOptions& options) {
  return run(cfg, &controller, nullptr, options);
}

}  // namespace shepherd
