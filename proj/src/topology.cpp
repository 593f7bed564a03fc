#include "dhfair/topology.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "dhfair/error.hpp"

namespace dhfair {

namespace {

std::string edgeName(std::size_t index, const Edge& e) {
  return "edge " + std::to_string(index) + " (" + std::to_string(e.a) + "-" +
         std::to_string(e.b) + ")";
}

}  // namespace

Topology::Topology(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (nodes_.empty()) {
    throw InvalidArgument("topology must have at least one node");
  }
  const std::size_t n = nodes_.size();
  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.a >= n || e.b >= n) {
      throw InvalidArgument(edgeName(i, e) + " references a node outside 0.." +
                            std::to_string(n - 1));
    }
    if (e.a == e.b) {
      throw InvalidArgument(edgeName(i, e) + " is a self-loop");
    }
    if (!std::isfinite(e.distance) || e.distance <= 0.0) {
      throw InvalidArgument(edgeName(i, e) +
                            " must have a finite positive distance");
    }
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert({key.first, key.second}).second) {
      throw InvalidArgument(edgeName(i, e) + " duplicates an earlier edge");
    }
  }
}

Topology Topology::withNodeCount(std::size_t n, std::vector<Edge> edges) {
  return Topology(std::vector<Node>(n), std::move(edges));
}

std::string Topology::displayLabel(NodeId id) const {
  const auto& label = nodes_.at(id).label;
  return label.empty() ? std::to_string(id) : label;
}

std::vector<std::vector<std::pair<NodeId, double>>> Topology::adjacency()
    const {
  std::vector<std::vector<std::pair<NodeId, double>>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.a].emplace_back(e.b, e.distance);
    adj[e.b].emplace_back(e.a, e.distance);
  }
  return adj;
}

bool Topology::isConnected() const {
  const auto adj = adjacency();
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (auto [v, d] : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == nodes_.size();
}

}  // namespace dhfair
