#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ddnm::rng {

// splitmix64 finalizer, used to derive independent engine seeds from a base
// seed plus a list of stream labels (series index, time index, sample index,
// purpose tag, ...).  Streams with distinct labels are independent for all
// practical purposes, and the derivation is order-insensitive to thread
// scheduling: a unit of work always draws from its own stream.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix(seed ^ 0x6a09e667f3bcc909ULL);
  for (auto id : ids) h = mix(h ^ mix(id));
  return h;
}

inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  return std::mt19937_64(derive(seed, ids));
}

// Stable tags for the named streams used across the engine.
enum Tag : std::uint64_t {
  kSynthetic = 1,
  kSssSeed = 2,
  kPathSample = 3,
  kModelDraw = 4,
};

}  // namespace ddnm::rng
