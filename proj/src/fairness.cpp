#include "dhfair/fairness.hpp"

#include <algorithm>
#include <cmath>

#include "dhfair/error.hpp"
#include "dhfair/graph_matrices.hpp"

namespace dhfair {

std::vector<double> producerLoads(const Assignment& a,
                                  std::span<const double> weights) {
  if (weights.size() != a.nodeCount()) {
    throw InvalidArgument("weight vector length does not match assignment");
  }
  std::vector<double> y(a.k, 0.0);
  for (std::size_t i = 0; i < a.nodeCount(); ++i) {
    y[a.producerOf[i]] += weights[i];
  }
  return y;
}

double jainIndex(std::span<const double> loads) {
  if (loads.empty()) throw InvalidArgument("Jain index needs k >= 1 loads");
  double sum = 0.0;
  double sumSq = 0.0;
  for (double y : loads) {
    if (!(y >= 0.0)) throw InvalidArgument("producer loads must be >= 0");
    sum += y;
    sumSq += y * y;
  }
  if (sumSq == 0.0) {
    throw InvalidArgument("Jain index is undefined for zero total demand");
  }
  return (sum * sum) / (static_cast<double>(loads.size()) * sumSq);
}

double distanceIndex(const Assignment& a, const Eigen::MatrixXd& paths) {
  const std::size_t n = a.nodeCount();
  if (static_cast<std::size_t>(paths.rows()) != n ||
      static_cast<std::size_t>(paths.cols()) != n) {
    throw InvalidArgument("path matrix does not match assignment size");
  }
  // Both sums walk the pairs in the same order so k = 1 gives exactly 0.
  double within = 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double d =
          paths(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
      if (!std::isfinite(d)) {
        throw InvalidArgument("distance index needs a connected topology");
      }
      total += d;
      if (a.producerOf[u] == a.producerOf[v]) within += d;
    }
  }
  if (total == 0.0) return 0.0;
  return 1.0 - within / total;
}

double distanceIndex(const Assignment& a, const Topology& topo) {
  if (!topo.isConnected()) {
    throw InvalidArgument("distance index needs a connected topology");
  }
  return distanceIndex(a, allPairsShortestPaths(topo));
}

double combinedKpi(double jain, double distance, double kpiAlpha) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(jain) || !unit(distance) || !unit(kpiAlpha)) {
    throw InvalidArgument("KPI inputs must lie in [0, 1]");
  }
  return kpiAlpha * jain + (1.0 - kpiAlpha) * distance;
}

KpiReport evaluateKpi(const SolveResult& result,
                      std::span<const double> weights,
                      const Eigen::MatrixXd& paths, double kpiAlpha) {
  KpiReport r;
  r.k = result.assignment.k;
  // Rounding can push the ratio a hair above 1 for equal loads.
  r.jain = std::min(1.0, jainIndex(producerLoads(result.assignment, weights)));
  r.distanceIndex = distanceIndex(result.assignment, paths);
  r.kpiAlpha = kpiAlpha;
  r.kpi = combinedKpi(r.jain, r.distanceIndex, kpiAlpha);
  r.solverName = result.solverName;
  r.energy = result.energy;
  return r;
}

}  // namespace dhfair
