#pragma once

// Portable seeded sampling. std::mt19937_64 output is fixed by the standard
// but the std distributions are not, so bounded integers and unit reals are
// derived here to keep results identical across standard libraries.

#include <cstdint>
#include <random>
#include <utility>

namespace dhfair {

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniformIndex(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniformUnit(rng);
}

template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniformIndex(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

/// splitmix64 step; used to derive independent child seeds.
inline std::uint64_t mixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace dhfair
