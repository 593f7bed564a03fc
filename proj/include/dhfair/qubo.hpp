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

using BitVector = std::vector<std::uint8_t>;

/// Penalty constants of the cost function.
///
/// `alpha` (balance, one per producer) and `gamma` (one-hot, one per node)
/// hold either a single broadcast value or one value per index.
struct PenaltyConfig {
  double beta = 1.0;
  std::vector<double> alpha{1.0};
  std::vector<double> gamma{1.0};

  double alphaFor(std::size_t producer) const {
    return alpha.size() == 1 ? alpha[0] : alpha.at(producer);
  }
  double gammaFor(std::size_t node) const {
    return gamma.size() == 1 ? gamma[0] : gamma.at(node);
  }

  /// Throws InvalidArgument unless every entry is finite and > 0 and the
  /// vector lengths are 1 or match k / n.
  void validate(std::size_t nodes, std::size_t producers) const;

  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

/// Flat layout of x_{i,j}: producer-major, variable = j * n + i.
class VarIndex {
 public:
  VarIndex() = default;
  VarIndex(std::size_t nodes, std::size_t producers)
      : nodes_(nodes), producers_(producers) {}

  std::size_t operator()(std::size_t node, std::size_t producer) const {
    return producer * nodes_ + node;
  }
  std::size_t node(std::size_t var) const { return var % nodes_; }
  std::size_t producer(std::size_t var) const { return var / nodes_; }
  std::size_t nodes() const { return nodes_; }
  std::size_t producers() const { return producers_; }
  std::size_t size() const { return nodes_ * producers_; }

  friend bool operator==(const VarIndex&, const VarIndex&) = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t producers_ = 0;
};

struct QuadTerm {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double value = 0.0;

  friend bool operator==(const QuadTerm&, const QuadTerm&) = default;
};

/// offset + sum_i linear[i] b_i + sum_{i<j} Q_ij b_i b_j.
///
/// Quadratic terms are stored sorted by (i, j), strictly upper triangular,
/// with no zero values. The linear vector is dense.
class QuboInstance {
 public:
  QuboInstance() = default;
  QuboInstance(VarIndex index, std::vector<double> linear,
               std::vector<QuadTerm> quadratic, double offset);

  std::size_t numVars() const { return index_.size(); }
  const VarIndex& varIndex() const { return index_; }
  const std::vector<double>& linear() const { return linear_; }
  const std::vector<QuadTerm>& quadratic() const { return quadratic_; }
  double offset() const { return offset_; }

  std::size_t numNonzeroLinear() const;

  friend bool operator==(const QuboInstance&, const QuboInstance&) = default;

 private:
  VarIndex index_;
  std::vector<double> linear_;
  std::vector<QuadTerm> quadratic_;
  double offset_ = 0.0;
};

/// Expands
///   beta * sum_j x_j^T DL x_j
///   + sum_j alpha_j (sum_i w_i x_ij - W/k)^2
///   + sum_i gamma_i (sum_j x_ij - 1)^2
/// into a QUBO, with DL the distance Laplacian and W = sum_i w_i. All
/// constants go to the offset, so energy() equals the cost exactly.
/// Throws InvalidArgument for k == 0, k > n, or a weight size mismatch.
QuboInstance buildQubo(const Topology& topo, std::span<const double> weights,
                       std::size_t k, const PenaltyConfig& cfg);

/// Same expansion with the combinatorial Laplacian and unit node weights,
/// i.e. the balance target is n/k nodes per producer.
QuboInstance buildUnweightedQubo(const Topology& topo, std::size_t k,
                                 const PenaltyConfig& cfg);

/// Throws InvalidArgument on a length mismatch.
double energy(const QuboInstance& q, std::span<const std::uint8_t> bits);

/// beta = 1, alpha = beta * R / min(w)^2, gamma = 2 (beta * R + alpha *
/// max(w)), where R is the largest row sum of the distance Laplacian (1 for
/// an edgeless graph). Adding an unassigned node or dropping a duplicate
/// assignment then always lowers the energy, so ground states are one-hot.
PenaltyConfig defaultPenalties(const Topology& topo,
                               std::span<const double> weights,
                               std::size_t k);

/// Coordinate text format. Header `p qubo <vars> <linear> <quad> <offset>`,
/// then `i i value` for each nonzero linear term and `i j value` (i < j)
/// for each quadratic term. Lines starting with `c` are comments.
std::string serializeQubo(const QuboInstance& q);
/// `variable,node,producer` table for the sidecar file.
std::string serializeVarMap(const VarIndex& index);

QuboInstance parseQubo(std::string_view quboText, std::string_view mapText);

/// Writes `path` and the sidecar `path` + ".map".
void exportQubo(const QuboInstance& q, const std::filesystem::path& path);
QuboInstance importQubo(const std::filesystem::path& path);

std::filesystem::path varMapPath(const std::filesystem::path& quboPath);

}  // namespace dhfair
