#pragma once

// Internal seeded-randomness helpers. Distribution draws are hand-rolled
// (instead of std::*_distribution) so pinned seeds reproduce byte-identical
// runs across standard-library versions.

#include <cmath>
#include <cstdint>
#include <random>

namespace ltlplan::detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

// Box-Muller; one draw per call, the paired value is discarded.
inline double gaussian(std::mt19937_64& rng, double mean, double sd) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * 3.141592653589793238462643 * u2);
  return mean + sd * z;
}

// Uniform integer in [0, n); n must be positive.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) %
         n;
}

}  // namespace ltlplan::detail
