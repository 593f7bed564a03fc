#include "dhfair/generators.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dhfair/error.hpp"
#include "dhfair/random.hpp"

namespace dhfair {

namespace {

void checkRule(const DistanceRule& rule) {
  if (!(rule.minDistance > 0.0) || !std::isfinite(rule.maxDistance) ||
      rule.maxDistance < rule.minDistance) {
    throw InvalidArgument("distance rule needs 0 < min <= max");
  }
}

class DistanceSource {
 public:
  explicit DistanceSource(const DistanceRule& rule)
      : rule_(rule), rng_(rule.seed) {}

  double next() {
    if (rule_.minDistance == rule_.maxDistance) return rule_.minDistance;
    return uniformReal(rng_, rule_.minDistance, rule_.maxDistance);
  }

  Rng& rng() { return rng_; }

 private:
  DistanceRule rule_;
  Rng rng_;
};

}  // namespace

Topology generateTree(std::size_t n, std::size_t branching,
                      const DistanceRule& rule) {
  if (n < 1) throw InvalidArgument("tree needs at least one node");
  if (branching < 1) throw InvalidArgument("tree branching must be >= 1");
  checkRule(rule);
  DistanceSource dist(rule);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (NodeId i = 1; i < n; ++i) {
    edges.push_back({(i - 1) / branching, i, dist.next()});
  }
  return Topology::withNodeCount(n, std::move(edges));
}

Topology generateRing(std::size_t n, std::size_t chords,
                      const DistanceRule& rule) {
  if (n < 3) throw InvalidArgument("ring needs at least three nodes");
  checkRule(rule);
  const std::size_t freePairs = n * (n - 1) / 2 - n;
  if (chords > freePairs) {
    throw InvalidArgument("ring with " + std::to_string(n) +
                          " nodes admits at most " +
                          std::to_string(freePairs) + " chords");
  }
  DistanceSource dist(rule);
  std::vector<Edge> edges;
  edges.reserve(n + chords);
  for (NodeId i = 0; i < n; ++i) {
    edges.push_back({i, (i + 1) % n, dist.next()});
  }
  if (chords > 0) {
    std::vector<std::pair<NodeId, NodeId>> candidates;
    candidates.reserve(freePairs);
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 2; b < n; ++b) {
        if (a == 0 && b == n - 1) continue;
        candidates.emplace_back(a, b);
      }
    }
    // Separate stream so chord choice does not shift cycle distances.
    Rng pick(mixSeed(rule.seed ^ 0x63686f7264ULL));
    shuffle(candidates.begin(), candidates.end(), pick);
    for (std::size_t c = 0; c < chords; ++c) {
      edges.push_back({candidates[c].first, candidates[c].second, dist.next()});
    }
  }
  return Topology::withNodeCount(n, std::move(edges));
}

}  // namespace dhfair
