#include <gtest/gtest.h>

#include "shepherd/engine.hpp"
#include "shepherd/policies.hpp"
#include "shepherd/rng.hpp"

namespace shepherd {
namespace {

TEST(InitWorld, PlacesSheepInsideRegionDeterministically) {
  WorldConfig cfg = default_config(30);
  cfg.rng_seed = 17;
  const auto a = init_world(cfg);
  EXPECT_EQ(a, init_world(cfg));
  ASSERT_EQ(a.n_sheep(), 30u);
  for (const auto& p : a.sheep_pos) {
    EXPECT_GE(p.x, cfg.init_region.min.x);
    EXPECT_LE(p.x, cfg.init_region.max.x);
    EXPECT_GE(p.y, cfg.init_region.min.y);
    EXPECT_LE(p.y, cfg.init_region.max.y);
  }
  for (const auto& v : a.sheep_prev_move) EXPECT_EQ(v, (Vec2{0, 0}));
  EXPECT_EQ(a.shepherd_pos, cfg.shepherd_init);
  EXPECT_EQ(a.k, 0);
  cfg.rng_seed = 18;
  EXPECT_NE(a.sheep_pos, init_world(cfg).sheep_pos);
}

TEST(InitWorld, DegenerateRegionFails) {
  WorldConfig cfg = default_config(2);
  cfg.init_region = {{1, 1}, {1, 1}};
  EXPECT_THROW(init_world(cfg), InitError);
  cfg.n_sheep = 1;
  cfg.kind_assignment.resize(1);
  EXPECT_NO_THROW(init_world(cfg));
}

TEST(SuccessCondition, Examples) {
  WorldConfig cfg = default_config(2);
  WorldState s = init_world(cfg);
  s.sheep_pos = {cfg.goal_center, cfg.goal_center + Vec2{cfg.goal_radius, 0}};
  EXPECT_TRUE(success_condition(s, cfg));  // boundary counts as inside
  s.sheep_pos[1].x += 1e-9;
  EXPECT_FALSE(success_condition(s, cfg));

  cfg.kind_assignment[1] = SheepKind::unresponsive();
  cfg.score_subset = ScoreSubset::kNormalOnly;
  EXPECT_TRUE(success_condition(s, cfg));
  cfg.score_subset = ScoreSubset::kAll;
  EXPECT_FALSE(success_condition(s, cfg));

  // No normal sheep at all: normal_only falls back to scoring everyone.
  cfg.kind_assignment[0] = SheepKind::unresponsive();
  cfg.score_subset = ScoreSubset::kNormalOnly;
  EXPECT_FALSE(success_condition(s, cfg));
}

TEST(RunTrial, ZeroTimeLimit) {
  WorldConfig cfg = default_config(3);
  cfg.time_limit = 0;
  const auto r = run_trial(cfg, {.record_trajectory = true});
  EXPECT_EQ(r.steps_used, 0);
  EXPECT_FALSE(r.success);
  ASSERT_EQ(r.trajectory.size(), 1u);
  EXPECT_EQ(r.final_state, init_world(cfg));
}

TEST(RunTrial, FlockStartingInGoalSucceedsImmediately) {
  WorldConfig cfg = default_config(3);
  cfg.init_region = {cfg.goal_center - Vec2{1, 1}, cfg.goal_center + Vec2{1, 1}};
  const auto r = run_trial(cfg);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.steps_used, 0);
}

TEST(RunTrial, ZeroTimeLimitInsideGoalSucceeds) {
  WorldConfig cfg = default_config(3);
  cfg.time_limit = 0;
  cfg.init_region = {cfg.goal_center, cfg.goal_center + Vec2{1, 1}};
  const auto r = run_trial(cfg);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.steps_used, 0);
}

TEST(RunTrial, ZeroGainFlockStaysPut) {
  WorldConfig cfg = default_config(4);
  cfg.base_gains = {0, 0, 0, 0, 8};
  cfg.shepherd_init = {-1000, -1000};
  cfg.shepherd_gains = {0, 0, 0};
  cfg.time_limit = 50;
  const auto r = run_trial(cfg);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.steps_used, 50);
  EXPECT_EQ(r.final_state.sheep_pos, init_world(cfg).sheep_pos);
}

TEST(RunTrial, TranslatedConfigTranslatesTrajectory) {
  const Vec2 t{64, -32};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    WorldConfig cfg = default_config(10);
    cfg.rng_seed = seed;
    cfg.time_limit = 20;  // trajectories are chaotic; compare a short horizon
    WorldConfig moved = cfg;
    moved.init_region = {cfg.init_region.min + t, cfg.init_region.max + t};
    moved.shepherd_init = cfg.shepherd_init + t;
    moved.goal_center = cfg.goal_center + t;
    const auto a = run_trial(cfg, {.record_trajectory = true});
    const auto b = run_trial(moved, {.record_trajectory = true});
    ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
      for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_LE(distance(a.trajectory[k].sheep_pos[i] + t, b.trajectory[k].sheep_pos[i]), 1e-9);
      }
      EXPECT_LE(distance(a.trajectory[k].shepherd_pos + t, b.trajectory[k].shepherd_pos), 1e-9);
    }
  }
}

TEST(RunTrial, RejectsInvalidConfig) {
  WorldConfig cfg = default_config(3);
  cfg.n_sheep = 0;
  EXPECT_THROW(run_trial(cfg), ConfigError);
  cfg = default_config(3);
  EXPECT_THROW(run_trial(cfg, init_world(default_config(4))), std::invalid_argument);
}

TEST(RunTrial, ReproducibleAndTrajectoryConsistent) {
  for (auto type : {PolicyType::kFat, PolicyType::kCollectThenGuide, PolicyType::kClassifyAndGuide}) {
    WorldConfig cfg = default_config(10);
    cfg.policy.type = type;
    cfg.kind_assignment[0] = SheepKind::unresponsive();
    cfg.rng_seed = 9;
    const TrialOptions opts{.record_trajectory = true, .record_labels = true};
    const auto a = run_trial(cfg, opts);
    EXPECT_EQ(a, run_trial(cfg, opts));
    ASSERT_EQ(a.trajectory.size(), static_cast<std::size_t>(a.steps_used) + 1);
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) EXPECT_EQ(a.trajectory[k].k, static_cast<std::int64_t>(k));
    EXPECT_EQ(a.trajectory.back().sheep_pos, a.final_state.sheep_pos);
    EXPECT_EQ(a.success, success_condition(a.final_state, cfg));
    if (type == PolicyType::kClassifyAndGuide) {
      EXPECT_EQ(a.final_labels.size(), 10u);
      EXPECT_FALSE(a.label_history.empty());
    } else {
      EXPECT_TRUE(a.final_labels.empty());
    }
  }
}

TEST(RunTrial, StepsNeverExceedCaps) {
  WorldConfig cfg = default_config(10);
  cfg.rng_seed = 2;
  cfg.time_limit = 500;
  const auto r = run_trial(cfg, {.record_trajectory = true});
  for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
    EXPECT_LE(distance(r.trajectory[k].shepherd_pos, r.trajectory[k - 1].shepherd_pos),
              cfg.shepherd_speed_cap * (1 + 1e-12));
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_LE(distance(r.trajectory[k].sheep_pos[i], r.trajectory[k - 1].sheep_pos[i]),
                cfg.sheep_speed_cap * (1 + 1e-12));
    }
  }
}

TEST(RunTrial, ScriptedControllerReproducesPolicyRun) {
  WorldConfig cfg = default_config(10);
  cfg.rng_seed = 4;
  const auto a = run_trial(cfg, {.record_trajectory = true});
  std::vector<Vec2> moves;
  const ShepherdController fat = [&](const WorldState& s) {
    moves.push_back(fat_step(s, fat_params(cfg), cfg.goal_center, cfg.norm_floor));
    return moves.back();
  };
  EXPECT_EQ(a, run_trial(cfg, fat, {.record_trajectory = true}));

  // Replaying the logged moves blind reproduces the run bit for bit.
  std::size_t step = 0;
  const ShepherdController replay = [&](const WorldState&) { return moves.at(step++); };
  EXPECT_EQ(a, run_trial(cfg, replay, {.record_trajectory = true}));
}

WorldState transform(WorldState s, Vec2 (*f)(Vec2), bool moves_are_vectors_only) {
  for (auto& p : s.sheep_pos) p = f(p);
  s.shepherd_pos = f(s.shepherd_pos);
  if (!moves_are_vectors_only) return s;
  for (auto& v : s.sheep_prev_move) v = f(v);
  return s;
}

Vec2 quarter(Vec2 p) { return {-p.y, p.x}; }
Vec2 mirror(Vec2 p) { return {p.y, p.x}; }

TEST(RunTrial, ExactSymmetriesAreBitExact) {
  for (auto f : {&quarter, &mirror}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      WorldConfig cfg = default_config(10);
      cfg.policy.type = PolicyType::kCollectThenGuide;
      cfg.kind_assignment[3] = SheepKind::unresponsive();
      cfg.rng_seed = seed;
      const auto s0 = init_world(cfg);
      const auto a = run_trial(cfg, s0, {.record_trajectory = true});
      WorldConfig moved = cfg;
      moved.goal_center = f(cfg.goal_center);
      const auto b = run_trial(moved, transform(s0, f, true), {.record_trajectory = true});
      ASSERT_EQ(a.steps_used, b.steps_used);
      for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
        for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(f(a.trajectory[k].sheep_pos[i]), b.trajectory[k].sheep_pos[i]);
      }
    }
  }
}

TEST(RunTrial, NearCollisionsStayFinite) {
  WorldConfig cfg = default_config(20);
  cfg.init_region = {{0, 0}, {1e-6, 1e-6}};
  cfg.shepherd_init = {5e-7, 5e-7};
  cfg.time_limit = 200;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.rng_seed = seed;
    const auto r = run_trial(cfg);
    for (const auto& p : r.final_state.sheep_pos) EXPECT_TRUE(is_finite(p));
    EXPECT_TRUE(is_finite(r.final_state.shepherd_pos));
  }
}

}  // namespace
}  // namespace shepherd
