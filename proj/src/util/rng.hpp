#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tide::util {

// splitmix64 finalizer; good avalanche for deriving independent streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic per-entity RNG stream: hash the base seed with a path of
// identifiers (e.g. {domain, class, sample}) so workers can generate
// independent entities in any order with identical results.
inline std::mt19937_64 rng_stream(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed ^ 0x5bf03635f0935ad1ull);
  for (std::uint64_t p : path) {
    h = mix64(h ^ mix64(p));
  }
  return std::mt19937_64(h);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi_inclusive) {
  std::uniform_int_distribution<int> d(lo, hi_inclusive);
  return d(g);
}

}  // namespace tide::util
