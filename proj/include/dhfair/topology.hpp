#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dhfair {

using NodeId = std::size_t;

struct Node {
  std::string label;
  std::optional<double> x;  // meters, metadata only
  std::optional<double> y;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Candidate pipe between two consumers. Distance in meters.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  double distance = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected consumer graph with dense node indices 0..n-1.
///
/// The constructor validates: n >= 1, endpoints in range, no self-loops,
/// no duplicate undirected edges, every distance finite and > 0.
/// Violations throw InvalidArgument naming the offending entity.
class Topology {
 public:
  Topology(std::vector<Node> nodes, std::vector<Edge> edges);

  /// n unlabeled nodes, edges as given.
  static Topology withNodeCount(std::size_t n, std::vector<Edge> edges);

  std::size_t nodeCount() const { return nodes_.size(); }
  std::size_t edgeCount() const { return edges_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Label if set, otherwise the decimal index.
  std::string displayLabel(NodeId id) const;

  /// Per-node list of (neighbor, distance).
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency() const;

  bool isConnected() const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

}  // namespace dhfair
