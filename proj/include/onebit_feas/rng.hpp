#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace obf {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a path of stream
/// indices. Every randomized quantity in the library is keyed this way, so a
/// value depends only on (seed, path) and never on generation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(seed, path));
}

// Stream tags for derive_seed paths.
namespace stream {
inline constexpr std::uint64_t kInstance = 1;
inline constexpr std::uint64_t kEnsemble = 2;
inline constexpr std::uint64_t kThresholds = 3;
inline constexpr std::uint64_t kSolver = 4;
inline constexpr std::uint64_t kTrial = 5;
inline constexpr std::uint64_t kPowerIteration = 6;
}  // namespace stream

}  // namespace obf
