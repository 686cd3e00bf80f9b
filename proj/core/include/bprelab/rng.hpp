#pragma once

#include <cstdint>
#include <random>

namespace bprelab {

// All randomness flows through explicitly passed generators; nothing is ever
// seeded from the clock. Independent streams are derived from a master seed
// via splitmix64 so that replicated runs are reproducible and results merge
// independently of scheduling order.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Generator for (master, stream, substream). Distinct ids give streams that
/// are independent for Monte Carlo purposes.
inline Rng derive_rng(std::uint64_t master, std::uint64_t stream,
                      std::uint64_t substream = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(stream + 0x517cc1b727220a95ull));
  h = splitmix64(h ^ splitmix64(substream + 0x2545f4914f6cdd1dull));
  return Rng(h);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform_pos(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace bprelab
