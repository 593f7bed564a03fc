#include "dhfair/graph_matrices.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

namespace dhfair {

Eigen::MatrixXd buildLaplacian(const Topology& topo) {
  const auto n = static_cast<Eigen::Index>(topo.nodeCount());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : topo.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    lap(a, a) += 1.0;
    lap(b, b) += 1.0;
    lap(a, b) -= 1.0;
    lap(b, a) -= 1.0;
  }
  return lap;
}

Eigen::MatrixXd buildIncidence(const Topology& topo) {
  const auto n = static_cast<Eigen::Index>(topo.nodeCount());
  const auto m = static_cast<Eigen::Index>(topo.edgeCount());
  Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& e = topo.edges()[static_cast<std::size_t>(k)];
    auto [lo, hi] = std::minmax(e.a, e.b);
    inc(static_cast<Eigen::Index>(lo), k) = 1.0;
    inc(static_cast<Eigen::Index>(hi), k) = -1.0;
  }
  return inc;
}

Eigen::MatrixXd buildDistanceLaplacian(const Topology& topo) {
  const auto n = static_cast<Eigen::Index>(topo.nodeCount());
  Eigen::MatrixXd dl = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : topo.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    dl(a, b) = e.distance;
    dl(b, a) = e.distance;
  }
  return dl;
}

GraphMatrices buildGraphMatrices(const Topology& topo) {
  GraphMatrices gm;
  gm.laplacian = buildLaplacian(topo);
  gm.incidence = buildIncidence(topo);
  gm.edgeDistances.resize(static_cast<Eigen::Index>(topo.edgeCount()));
  for (std::size_t k = 0; k < topo.edgeCount(); ++k) {
    gm.edgeDistances(static_cast<Eigen::Index>(k)) = topo.edges()[k].distance;
  }
  gm.distanceLaplacian = buildDistanceLaplacian(topo);
  return gm;
}

Eigen::MatrixXd allPairsShortestPaths(const Topology& topo) {
  const std::size_t n = topo.nodeCount();
  const auto adj = topo.adjacency();
  Eigen::MatrixXd dist =
      Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n), kUnreachable);

  using Item = std::pair<double, NodeId>;
  std::vector<double> best(n);
  for (NodeId src = 0; src < n; ++src) {
    std::fill(best.begin(), best.end(), kUnreachable);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    best[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > best[u]) continue;
      for (auto [v, w] : adj[u]) {
        if (d + w < best[v]) {
          best[v] = d + w;
          pq.emplace(best[v], v);
        }
      }
    }
    for (NodeId v = 0; v < n; ++v) {
      dist(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(v)) =
          best[v];
    }
  }
  // Dijkstra from each side can differ in the last bit when sums associate
  // differently; keep the matrix exactly symmetric.
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      const double d = std::min(dist(iu, iv), dist(iv, iu));
      dist(iu, iv) = d;
      dist(iv, iu) = d;
    }
  }
  return dist;
}

}  // namespace dhfair
