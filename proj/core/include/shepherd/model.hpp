#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shepherd/vec2.hpp"

namespace shepherd {

/// Per-sheep force coefficients and the sensing radius R.
struct GainVector {
  double k1 = 3.0;  // separation
  double k2 = 0.3;  // alignment
  double k3 = 1.0;  // attraction
  double k4 = 3.0;  // shepherd avoidance
  double sense_radius = 8.0;

  friend bool operator==(const GainVector&, const GainVector&) = default;
};

/// Bits of the force-reception mask. Written as a string the order is
/// separation, alignment, attraction, avoidance, e.g. "1110".
enum ForceBit : std::uint8_t {
  kSeparation = 0b1000,
  kAlignment = 0b0100,
  kAttraction = 0b0010,
  kAvoidance = 0b0001,
};

inline constexpr std::uint8_t kNormalMask = 0b1111;
inline constexpr std::uint8_t kUnresponsiveMask = 0b1110;

struct SheepKind {
  std::uint8_t mask = kNormalMask;
  double scale = 1.0;

  static SheepKind normal() { return {}; }
  static SheepKind unresponsive() { return {kUnresponsiveMask, 1.0}; }

  bool is_normal() const { return mask == kNormalMask; }
  bool is_unresponsive() const { return mask == kUnresponsiveMask; }
  /// Any of the 14 masks that receive some but not all forces.
  bool is_variant() const { return mask != kNormalMask && mask != 0; }
  bool receives(ForceBit bit) const { return (mask & bit) != 0; }

  friend bool operator==(const SheepKind&, const SheepKind&) = default;
};

/// The 14 variant masks in increasing numeric order.
std::vector<std::uint8_t> variant_masks();

std::string mask_to_string(std::uint8_t mask);
/// Parses "1010"-style strings. Throws std::invalid_argument.
std::uint8_t mask_from_string(std::string_view text);

/// Masked-out gains become exactly zero; kept gains are multiplied by kind.scale.
GainVector effective_gains(const GainVector& base, const SheepKind& kind);

/// v / |v| when |v| >= norm_floor, otherwise the zero vector.
Vec2 safe_unit(const Vec2& v, double norm_floor);

/// Scales v down to length `cap` if it is longer; direction preserved.
Vec2 clamp_norm(const Vec2& v, double cap);

/// Snapshot of every agent at time index k.
struct WorldState {
  std::int64_t k = 0;
  std::vector<Vec2> sheep_pos;
  std::vector<Vec2> sheep_prev_move;  // v_j(k-1); zero before the first step
  Vec2 shepherd_pos;

  std::size_t n_sheep() const { return sheep_pos.size(); }
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Throws std::invalid_argument when vectors are non-finite or lengths disagree.
void check_state(const WorldState& state);

}  // namespace shepherd
