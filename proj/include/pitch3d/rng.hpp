#pragma once

#include <cstdint>
#include <random>

namespace pitch3d {

using Rng = std::mt19937_64;

/// splitmix64 finalizer over (seed, stream). Derives independent per-item
/// streams so parallel generation does not depend on scheduling order.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed, stream)); }

}  // namespace pitch3d
