#pragma once

#include <cstdint>

namespace percolab {

/// Counter-based generator: value(seed, counter) is a stateless strong 64-bit
/// mix (splitmix64 finalizer over seed and counter), so any edge, trial or
/// substream can be sampled independently of evaluation order and thread
/// count. The documented mapping is: edge slot s of a window draws
/// uniform(stream_seed, s) where stream_seed = derive(master, tag...).
inline uint64_t mix64(uint64_t seed, uint64_t counter) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(uint64_t seed, uint64_t counter) {
  return static_cast<double>(mix64(seed, counter) >> 11) * 0x1.0p-53;
}

/// Named substreams hang off one seed: trial streams, the V/W/Z streams of the
/// three-variable coupling, etc.
inline uint64_t derive_stream(uint64_t seed, uint64_t tag) { return mix64(seed, tag); }

inline constexpr uint64_t kStreamTrial = 0x747269616cull;   // per-trial seeds
inline constexpr uint64_t kStreamField = 0x6669656c64ull;   // uniform edge field
inline constexpr uint64_t kStreamV = 0x56ull;
inline constexpr uint64_t kStreamW = 0x57ull;
inline constexpr uint64_t kStreamZ = 0x5aull;

inline uint64_t trial_seed(uint64_t master, uint64_t trial_index) {
  return mix64(derive_stream(master, kStreamTrial), trial_index);
}

}  // namespace percolab
