#pragma once

#include <cstdint>
#include <random>

namespace advsysid {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed split: seed for work unit `index` of stream `stream`
/// under `master`. Independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return mix64(mix64(master ^ mix64(stream + 0x5851f42d4c957f2dULL)) + index);
}

// Named streams used across modules.
inline constexpr std::uint64_t kStreamSystem = 1;
inline constexpr std::uint64_t kStreamAttackFlags = 2;
inline constexpr std::uint64_t kStreamAttackValues = 3;

}  // namespace advsysid
