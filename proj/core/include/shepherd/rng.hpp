#pragma once

#include <cstdint>

namespace shepherd {

/// SplitMix64 output function; also used as a stable 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw n of stream `seed` is
/// splitmix64(splitmix64(seed) + n * golden), so any draw can be reproduced
/// from (seed, n) alone. Identified in configs as "splitmix64-counter-v1".
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

  constexpr std::uint64_t at(std::uint64_t counter) const {
    return splitmix64(key_ + counter * 0x9E3779B97F4A7C15ULL);
  }
  constexpr std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  constexpr double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Order-sensitive combination of 64-bit values into one seed.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
}

}  // namespace shepherd
