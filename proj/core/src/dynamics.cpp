#include "shepherd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shepherd {
namespace {

void check_index(const WorldState& state, std::size_t i) {
  if (i >= state.n_sheep()) {
    throw std::out_of_range("sheep index " + std::to_string(i) + " out of range (n_sheep=" +
                            std::to_string(state.n_sheep()) + ")");
  }
}

// d / max(|d|, floor)^3
Vec2 inverse_cube(const Vec2& d, double norm_floor) {
  const double n = std::max(std::sqrt(d.x * d.x + d.y * d.y), norm_floor);
  return d / (n * n * n);
}

ForceBreakdown forces_unchecked(const WorldState& state, std::size_t i, double radius,
                                double norm_floor) {
  ForceBreakdown f;
  const Vec2 xi = state.sheep_pos[i];
  std::size_t count = 0;
  for (std::size_t j = 0; j < state.n_sheep(); ++j) {
    if (j == i) continue;
    const Vec2 d = state.sheep_pos[j] - xi;
    if (std::sqrt(d.x * d.x + d.y * d.y) > radius) continue;
    ++count;
    f.separation -= inverse_cube(d, norm_floor);
    f.alignment += safe_unit(state.sheep_prev_move[j], norm_floor);
    f.attraction += safe_unit(d, norm_floor);
  }
  if (count > 0) {
    const double inv = 1.0 / static_cast<double>(count);
    f.separation *= inv;
    f.alignment *= inv;
    f.attraction *= inv;
  }
  f.avoidance = -inverse_cube(state.shepherd_pos - xi, norm_floor);
  return f;
}

}  // namespace

std::vector<std::size_t> neighbor_set(const WorldState& state, std::size_t i, double radius) {
  check_index(state, i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < state.n_sheep(); ++j) {
    if (j == i) continue;
    const Vec2 d = state.sheep_pos[j] - state.sheep_pos[i];
    if (std::sqrt(d.x * d.x + d.y * d.y) <= radius) out.push_back(j);
  }
  return out;
}

ForceBreakdown sheep_forces(const WorldState& state, std::size_t i, double radius,
                            double norm_floor) {
  check_index(state, i);
  return forces_unchecked(state, i, radius, norm_floor);
}

ForceBreakdown sheep_forces(const WorldState& state, std::size_t i, const WorldConfig& cfg) {
  check_index(state, i);
  const double radius = effective_gains(cfg.base_gains, cfg.kind_assignment.at(i)).sense_radius;
  return forces_unchecked(state, i, radius, cfg.norm_floor);
}

void sheep_step_inplace(WorldState& state, std::span<const GainVector> gains, double speed_cap,
                        double norm_floor, std::vector<Vec2>& scratch) {
  const std::size_t n = state.n_sheep();
  if (gains.size() != n) throw std::invalid_argument("gain count differs from sheep count");
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GainVector& g = gains[i];
    const ForceBreakdown f = forces_unchecked(state, i, g.sense_radius, norm_floor);
    const Vec2 v = g.k1 * f.separation + g.k2 * f.alignment + g.k3 * f.attraction +
                   g.k4 * f.avoidance;
    scratch[i] = clamp_norm(v, speed_cap);
  }
  for (std::size_t i = 0; i < n; ++i) {
    state.sheep_pos[i] += scratch[i];
    state.sheep_prev_move[i] = scratch[i];
  }
  ++state.k;
}

WorldState sheep_step(const WorldState& state, std::span<const GainVector> gains,
                      double speed_cap, double norm_floor) {
  WorldState next = state;
  std::vector<Vec2> scratch;
  sheep_step_inplace(next, gains, speed_cap, norm_floor, scratch);
  return next;
}

WorldState sheep_step(const WorldState& state, const WorldConfig& cfg) {
  const auto gains = effective_gains(cfg);
  return sheep_step(state, gains, cfg.sheep_speed_cap, cfg.norm_floor);
}

}  // namespace shepherd
