#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace indiff {

/// Stateless counter-based generator: every draw is a hash of
/// (seed, stream, counter, slot), so any draw can be reproduced without
/// replaying the ones before it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t bits(std::uint64_t counter, std::uint64_t slot) const noexcept {
    return mix(key_ ^ mix(counter * 0x9E3779B97F4A7C15ULL + slot * 0xBF58476D1CE4E5B9ULL + 1));
  }

  /// Uniform on (0, 1), 53 bits.
  double uniform(std::uint64_t counter, std::uint64_t slot) const noexcept {
    return (static_cast<double>(bits(counter, slot) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on slots (2*slot, 2*slot+1).
  double normal(std::uint64_t counter, std::uint64_t slot) const noexcept {
    const double u1 = uniform(counter, 2 * slot);
    const double u2 = uniform(counter, 2 * slot + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace indiff
