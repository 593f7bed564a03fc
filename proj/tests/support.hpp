#pragma once

// Shared fixtures and independent reference implementations for the tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dhfair/generators.hpp"
#include "dhfair/topology.hpp"

namespace dhfair::testing {

struct SuiteCase {
  std::string name;
  Topology topo;
  std::vector<double> weights;  // normalized, strictly positive
};

inline std::vector<double> randomWeights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& v : w) sum += (v = u(rng));
  for (auto& v : w) v /= sum;
  return w;
}

// Connected graph: random spanning tree plus a few random extra edges.
inline Topology randomConnected(std::size_t n, std::size_t extra,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  std::vector<Edge> edges;
  auto has = [&](NodeId a, NodeId b) {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
      return (e.a == a && e.b == b) || (e.a == b && e.b == a);
    });
  };
  for (NodeId v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    edges.push_back({pick(rng), v, dist(rng)});
  }
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  for (std::size_t tries = 0; extra > 0 && tries < 200; ++tries) {
    const NodeId a = any(rng), b = any(rng);
    if (a == b || has(a, b)) continue;
    edges.push_back({a, b, dist(rng)});
    --extra;
  }
  return Topology::withNodeCount(n, edges);
}

// 20 seeded connected topologies with 2 <= n <= 8: trees, rings, and
// random graphs, with a mix of unit and random distances and weights.
inline std::vector<SuiteCase> suite() {
  std::vector<SuiteCase> out;
  std::mt19937_64 rng(2024);
  auto add = [&](std::string name, Topology t, bool uniform) {
    const std::size_t n = t.nodeCount();
    std::vector<double> w = uniform ? std::vector<double>(n, 1.0 / n)
                                    : randomWeights(n, rng);
    out.push_back({std::move(name), std::move(t), std::move(w)});
  };
  add("k2", Topology::withNodeCount(2, {{0, 1, 1.0}}), true);
  add("p3", generateTree(3, 1), true);
  add("p4", generateTree(4, 1), true);
  add("c4", generateRing(4, 0), true);
  add("k3w", generateRing(3, 0, DistanceRule::uniform(0.5, 2.0, 3)), false);
  add("star5", generateTree(5, 4), false);
  add("tree6", generateTree(6, 2, DistanceRule::uniform(0.5, 2.0, 6)), false);
  add("tree7", generateTree(7, 2), true);
  add("tree8", generateTree(8, 3, DistanceRule::uniform(0.5, 2.0, 8)), false);
  add("ring5", generateRing(5, 1, DistanceRule::uniform(0.5, 2.0, 5)), false);
  add("ring6", generateRing(6, 0), true);
  add("ring6c", generateRing(6, 2, DistanceRule::uniform(0.5, 2.0, 7)), false);
  add("ring7", generateRing(7, 2), false);
  add("ring8", generateRing(8, 0), true);
  add("ring8c", generateRing(8, 3, DistanceRule::uniform(0.5, 2.0, 9)), false);
  for (std::size_t i = 0; i < 5; ++i) {
    const std::size_t n = 4 + i;  // 4..8
    add("rand" + std::to_string(i), randomConnected(n, i + 1, rng), false);
  }
  return out;
}

// ---- reference implementations ------------------------------------------

// Bits laid out as x[j * n + i]; evaluates the cost function term by term
// from the edge list.
inline double directCost(const Topology& topo, const std::vector<double>& w,
                         std::size_t k, double beta,
                         const std::vector<double>& alpha,
                         const std::vector<double>& gamma,
                         const std::vector<std::uint8_t>& x) {
  const std::size_t n = topo.nodeCount();
  auto bit = [&](std::size_t i, std::size_t j) { return x[j * n + i] != 0; };
  auto al = [&](std::size_t j) { return alpha.size() == 1 ? alpha[0] : alpha[j]; };
  auto ga = [&](std::size_t i) { return gamma.size() == 1 ? gamma[0] : gamma[i]; };

  // Dense distance-Laplacian built straight from the edges.
  std::vector<double> dl(n * n, 0.0);
  for (const auto& e : topo.edges()) {
    dl[e.a * n + e.b] = e.distance;
    dl[e.b * n + e.a] = e.distance;
  }
  double W = 0.0;
  for (double v : w) W += v;

  double cost = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double quad = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (bit(a, j) && bit(b, j)) quad += dl[a * n + b];
      }
    }
    cost += beta * quad;
    double load = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (bit(i, j)) load += w[i];
    }
    cost += al(j) * (load - W / k) * (load - W / k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += bit(i, j) ? 1.0 : 0.0;
    cost += ga(i) * (s - 1.0) * (s - 1.0);
  }
  return cost;
}

inline std::vector<std::uint8_t> bitsOf(std::uint64_t mask, std::size_t len) {
  std::vector<std::uint8_t> b(len);
  for (std::size_t v = 0; v < len; ++v) b[v] = (mask >> v) & 1U;
  return b;
}

inline std::vector<std::uint8_t> oneHot(const std::vector<std::size_t>& p,
                                        std::size_t k) {
  const std::size_t n = p.size();
  std::vector<std::uint8_t> b(n * k, 0);
  for (std::size_t i = 0; i < n; ++i) b[p[i] * n + i] = 1;
  return b;
}

// Shortest path lengths by enumerating every simple path (small n only).
inline std::vector<double> bruteForcePaths(const Topology& topo) {
  const std::size_t n = topo.nodeCount();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> adj(n * n, inf);
  for (const auto& e : topo.edges()) {
    adj[e.a * n + e.b] = adj[e.b * n + e.a] = e.distance;
  }
  std::vector<double> best(n * n, inf);
  std::vector<bool> used(n, false);
  // Depth-first over simple paths from each source.
  auto dfs = [&](auto&& self, std::size_t src, std::size_t at, double len) -> void {
    best[src * n + at] = std::min(best[src * n + at], len);
    for (std::size_t nb = 0; nb < n; ++nb) {
      if (used[nb] || adj[at * n + nb] == inf) continue;
      used[nb] = true;
      self(self, src, nb, len + adj[at * n + nb]);
      used[nb] = false;
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    used.assign(n, false);
    used[s] = true;
    dfs(dfs, s, s, 0.0);
  }
  return best;
}

// Every assignment of n nodes to k producers, in lexicographic order.
template <class F>
void forEachAssignment(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> p(n, 0);
  while (true) {
    f(p);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++p[i] < k) break;
      p[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

inline bool relClose(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace dhfair::testing
