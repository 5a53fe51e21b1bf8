#pragma once

#include <cstdint>

// Counter-based random values built on the splitmix64 output function.
//
// value(seed, n) is the n-th output of a splitmix64 stream started at `seed`,
// computed in O(1) because the splitmix64 state advances additively. Draws
// are addressed, not sequenced: replicates, rounds and lattice cells consume
// disjoint indices of derived streams with no shared generator state, so the
// same (seed, index) always yields the same bits regardless of evaluation
// order, thread count, or SIMD width.
//
// Stream layout used across the project:
//   replicate seed   = at(master_seed, replicate_index)
//   init-pattern key = at(replicate_seed, 0)
//   round key t      = at(replicate_seed, t + 1)
//   cell draw        = at(round_key, 2*cell + d)   with d in {0, 1}

namespace mcpd::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 output mix (Steele, Lea, Flood; Vigna's constants)
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// n-th output of the splitmix64 stream seeded with `seed`
constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t n) noexcept {
  return mix64(seed + (n + 1) * kGamma);
}

// uniform double in [0, 1), top 53 bits
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double unit_at(std::uint64_t seed, std::uint64_t n) noexcept {
  return to_unit(at(seed, n));
}

}  // namespace mcpd::rng
