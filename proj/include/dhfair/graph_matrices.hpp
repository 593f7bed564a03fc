#pragma once

#include <Eigen/Dense>
#include <limits>

#include "dhfair/topology.hpp"

namespace dhfair {

/// Marker stored in shortest-path matrices for unreachable pairs.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct GraphMatrices {
  Eigen::MatrixXd laplacian;          // n x n
  Eigen::MatrixXd incidence;          // n x m, +1 at lower endpoint, -1 at upper
  Eigen::VectorXd edgeDistances;      // diagonal of the m x m distance matrix
  Eigen::MatrixXd distanceLaplacian;  // n x n, zero diagonal
};

/// Combinatorial Laplacian: degree on the diagonal, -1 per edge.
Eigen::MatrixXd buildLaplacian(const Topology& topo);

/// Signed node-edge incidence. Edge e gets +1 on min(a,b) and -1 on max(a,b).
Eigen::MatrixXd buildIncidence(const Topology& topo);

/// Zero-diagonal matrix holding the pipe distance on every edge entry.
///
/// Equal to the off-diagonal part of -(I D I^T); for a 0/1 indicator x,
/// x^T M x is twice the summed distance of edges inside the indicated set.
Eigen::MatrixXd buildDistanceLaplacian(const Topology& topo);

GraphMatrices buildGraphMatrices(const Topology& topo);

/// Dijkstra from every source. Unreachable pairs hold kUnreachable.
Eigen::MatrixXd allPairsShortestPaths(const Topology& topo);

}  // namespace dhfair
