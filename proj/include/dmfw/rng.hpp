#pragma once

#include <cstdint>
#include <random>

namespace dmfw {

/// splitmix64 finalizer; used to derive well-separated substream seeds from
/// (seed, tag) pairs without correlations between adjacent seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix_seed(mix_seed(seed) + tag);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t tag = 0) {
  return std::mt19937_64(mix_seed(seed, tag));
}

}  // namespace dmfw
