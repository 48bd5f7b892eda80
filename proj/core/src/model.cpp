#include "shepherd/model.hpp"

#include <cmath>

namespace shepherd {

std::vector<std::uint8_t> variant_masks() {
  std::vector<std::uint8_t> masks;
  for (std::uint8_t m = 1; m < kNormalMask; ++m) masks.push_back(m);
  return masks;
}

std::string mask_to_string(std::uint8_t mask) {
  std::string s(4, '0');
  for (int b = 0; b < 4; ++b) {
    if (mask & (0b1000 >> b)) s[b] = '1';
  }
  return s;
}

std::uint8_t mask_from_string(std::string_view text) {
  if (text.size() != 4) {
    throw std::invalid_argument("kind mask must have 4 binary digits, got '" +
                                std::string(text) + "'");
  }
  std::uint8_t mask = 0;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("kind mask must contain only 0 and 1, got '" +
                                  std::string(text) + "'");
    }
    mask = static_cast<std::uint8_t>((mask << 1) | (c == '1'));
  }
  return mask;
}

GainVector effective_gains(const GainVector& base, const SheepKind& kind) {
  auto pick = [&](double k, ForceBit bit) { return kind.receives(bit) ? k * kind.scale : 0.0; };
  return {pick(base.k1, kSeparation), pick(base.k2, kAlignment), pick(base.k3, kAttraction),
          pick(base.k4, kAvoidance), base.sense_radius};
}

Vec2 safe_unit(const Vec2& v, double norm_floor) {
  const double n = std::sqrt(v.x * v.x + v.y * v.y);
  if (n < norm_floor) return {};
  return {v.x / n, v.y / n};
}

Vec2 clamp_norm(const Vec2& v, double cap) {
  const double n = std::sqrt(v.x * v.x + v.y * v.y);
  if (n <= cap) return v;
  return v * (cap / n);
}

void check_state(const WorldState& state) {
  if (state.sheep_pos.size() != state.sheep_prev_move.size()) {
    throw std::invalid_argument("sheep_pos and sheep_prev_move lengths differ");
  }
  if (!is_finite(state.shepherd_pos)) throw std::invalid_argument("non-finite shepherd position");
  for (std::size_t i = 0; i < state.sheep_pos.size(); ++i) {
    if (!is_finite(state.sheep_pos[i]) || !is_finite(state.sheep_prev_move[i])) {
      throw std::invalid_argument("non-finite vector for sheep " + std::to_string(i));
    }
  }
}

}  // namespace shepherd
