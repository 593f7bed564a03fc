#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "dhfair/solvers.hpp"
#include "dhfair/topology.hpp"

namespace dhfair {

/// Share of total demand served by each producer.
std::vector<double> producerLoads(const Assignment& a,
                                  std::span<const double> weights);

/// (sum y)^2 / (k sum y^2). Lies in [1/k, 1]; 1 iff all loads are equal.
/// Throws InvalidArgument for an empty or all-zero load vector.
double jainIndex(std::span<const double> loads);

/// 1 - (shortest-path distance summed over node pairs sharing a producer) /
/// (shortest-path distance summed over all node pairs).
///
/// `paths` is the all-pairs shortest-path matrix of the topology; it must
/// be finite. A single-node topology has no pairs and scores 0.
double distanceIndex(const Assignment& a, const Eigen::MatrixXd& paths);

/// Computes the shortest paths first. Throws InvalidArgument when the
/// topology is disconnected.
double distanceIndex(const Assignment& a, const Topology& topo);

/// kpiAlpha * jain + (1 - kpiAlpha) * distance. All inputs in [0, 1].
double combinedKpi(double jain, double distance, double kpiAlpha = 0.5);

struct KpiReport {
  std::size_t k = 0;
  double jain = 0.0;
  double distanceIndex = 0.0;
  double kpi = 0.0;
  double kpiAlpha = 0.5;
  std::string solverName;
  double energy = 0.0;
};

KpiReport evaluateKpi(const SolveResult& result,
                      std::span<const double> weights,
                      const Eigen::MatrixXd& paths, double kpiAlpha = 0.5);

}  // namespace dhfair
