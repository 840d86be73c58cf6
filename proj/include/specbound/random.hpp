#pragma once

#include <cmath>
#include <cstdint>

#include "specbound/core.hpp"

namespace specbound {

/// splitmix64 step; the whole Monte-Carlo pipeline is built on it so that a
/// seed reproduces trials bit-for-bit on any platform.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic RNG with an explicit substream index (used to resample
/// degenerate constructions without disturbing neighbouring seeds).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(seed ^ (0xD1B54A32D192ED03ull * (stream + 1))) {
    for (int i = 0; i < 4; ++i) splitmix64_next(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(splitmix64_next(state_) >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) { return splitmix64_next(state_) % n; }

  /// Standard normal via Box-Muller (implementation-pinned, unlike
  /// std::normal_distribution).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    has_spare_ = true;
    spare_ = r * std::sin(2.0 * kPi * u2);
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace specbound
