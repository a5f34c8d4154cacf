#pragma once

#include <cstdint>

namespace stomp {

/// Counter-keyed deterministic PRNG (splitmix64 core).
///
/// Generators are required to be pure functions of (seed, t), so the
/// stream for time step t is derived from the key instead of carrying
/// state across calls. Draws are produced portably from raw 64-bit
/// words; no <random> distributions are involved, which keeps output
/// bitwise identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(mix(seed)) {}

  Rng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(mix(mix(seed) + 0x9e3779b97f4a7c15ull * (stream + 1))) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Rejection-free modulo is fine here; streams are short and the
    // bias at desk-scale bounds is far below anything we measure.
    return next() % bound;
  }

  bool chance(double p) noexcept { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdull;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ull;
    z ^= z >> 33;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace stomp
