#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ghzcs {

// splitmix64 finalizer; mixes (seed, stream) pairs into well-separated engine
// seeds so numbered substreams never share state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Engine for substream `stream` of `seed`. Per-shot / per-trial streams are
// derived this way, so shot-level parallelism cannot change results.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = splitmix64(seed) ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL);
  return std::mt19937_64(splitmix64(z));
}

// Chain several indices into one derived seed (sweep -> trial -> angle ...).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t p : path) {
    s = splitmix64(s ^ splitmix64(p ^ 0x2545f4914f6cdd1dULL));
  }
  return s;
}

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace ghzcs
