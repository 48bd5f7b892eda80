#pragma once

#include <span>
#include <vector>

#include "shepherd/config.hpp"
#include "shepherd/model.hpp"

namespace shepherd {

/// The four per-sheep force terms before gains are applied.
struct ForceBreakdown {
  Vec2 separation;
  Vec2 alignment;
  Vec2 attraction;
  Vec2 avoidance;
};

/// Indices j != i with |x_j - x_i| <= radius, ascending. Throws std::out_of_range.
std::vector<std::size_t> neighbor_set(const WorldState& state, std::size_t i, double radius);

ForceBreakdown sheep_forces(const WorldState& state, std::size_t i, double radius,
                            double norm_floor);
/// Uses the effective sensing radius of sheep i under cfg.
ForceBreakdown sheep_forces(const WorldState& state, std::size_t i, const WorldConfig& cfg);

/// Advances every sheep one step synchronously; the shepherd does not move.
/// `gains` holds the effective gains of each sheep.
WorldState sheep_step(const WorldState& state, std::span<const GainVector> gains,
                      double speed_cap, double norm_floor);
WorldState sheep_step(const WorldState& state, const WorldConfig& cfg);

/// In-place variant used by the simulation loop; `scratch` avoids reallocation.
void sheep_step_inplace(WorldState& state, std::span<const GainVector> gains, double speed_cap,
                        double norm_floor, std::vector<Vec2>& scratch);

}  // namespace shepherd
