#pragma once

#include <cstddef>
#include <cstdint>

#include "dhfair/topology.hpp"

namespace dhfair {

/// How generated edges get their length. minDistance == maxDistance gives a
/// constant; otherwise each edge draws uniformly from [min, max) with seed.
struct DistanceRule {
  double minDistance = 1.0;
  double maxDistance = 1.0;
  std::uint64_t seed = 0;

  static DistanceRule unit() { return {}; }
  static DistanceRule uniform(double lo, double hi, std::uint64_t seed) {
    return {lo, hi, seed};
  }
};

/// Complete `branching`-ary tree filled in breadth-first order: node i > 0
/// hangs off node (i - 1) / branching. Always n - 1 edges.
Topology generateTree(std::size_t n, std::size_t branching,
                      const DistanceRule& rule = DistanceRule::unit());

/// Cycle 0-1-...-(n-1)-0 plus `chords` distinct random extra edges.
/// Throws InvalidArgument for n < 3 or more chords than free node pairs.
Topology generateRing(std::size_t n, std::size_t chords,
                      const DistanceRule& rule = DistanceRule::unit());

}  // namespace dhfair
