#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dhfair/topology.hpp"

namespace dhfair {

/// Per-node demand time series, Nt rows by n columns, all values >= 0.
class DemandMatrix {
 public:
  DemandMatrix(std::vector<std::string> labels, std::size_t timesteps,
               std::vector<double> rowMajorValues);

  std::size_t timesteps() const { return timesteps_; }
  std::size_t nodeCount() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double at(std::size_t t, std::size_t node) const {
    return values_[t * labels_.size() + node];
  }
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * labels_.size(), labels_.size()};
  }
  const std::vector<double>& values() const { return values_; }

  /// Copy with every value multiplied by `factor` (> 0).
  DemandMatrix scaled(double factor) const;

  /// Columns reordered to topology node order. Header labels are matched
  /// against node labels first, then read as node indices.
  DemandMatrix alignedTo(const Topology& topo) const;

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::size_t timesteps_;
  std::vector<double> values_;
};

/// Static node weights: strictly positive and summing to 1 within 1e-12.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> w);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }
  operator std::span<const double>() const { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

/// w_i = max_t d(t,i) / sum_i max_t d(t,i). Throws InvalidArgument naming
/// the first node whose column is all zeros.
WeightVector computeWeights(const DemandMatrix& demands);

/// Comma-separated, header row of node labels, one row per timestep.
DemandMatrix parseDemands(std::string_view text);
DemandMatrix loadDemands(const std::filesystem::path& path);
std::string serializeDemands(const DemandMatrix& demands);

/// Weights file: header `node,label,weight`, one row per node.
std::string serializeWeights(const WeightVector& w,
                             const std::vector<std::string>& labels);
WeightVector parseWeights(std::string_view text);
WeightVector loadWeights(const std::filesystem::path& path);

struct SyntheticDemandOptions {
  std::size_t timesteps = 8760;
  /// Log-normal spread of per-node peak demand.
  double peakSpread = 0.5;
  /// Nodes 0..largeConsumers-1 get their peak multiplied by largeFactor.
  std::size_t largeConsumers = 0;
  double largeFactor = 4.0;
  std::uint64_t seed = 0;
};

/// Seeded annual-style profiles: a seasonal cosine with per-node phase and
/// multiplicative noise on top of a per-node peak.
DemandMatrix syntheticDemand(const std::vector<std::string>& labels,
                             const SyntheticDemandOptions& options);

}  // namespace dhfair
