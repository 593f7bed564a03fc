#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhfair/qubo.hpp"
#include "dhfair/topology.hpp"

namespace dhfair {

/// Node -> producer map. Every node has exactly one producer in [0, k);
/// producers may be empty.
struct Assignment {
  std::vector<std::size_t> producerOf;
  std::size_t k = 1;

  Assignment() = default;
  Assignment(std::vector<std::size_t> producers, std::size_t k);

  std::size_t nodeCount() const { return producerOf.size(); }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Producers relabeled in order of their smallest member node; empty
/// producers take the remaining labels.
Assignment canonicalize(const Assignment& a);

struct SolveResult {
  Assignment assignment;
  double energy = 0.0;  // QUBO energy of the one-hot encoding
  std::string solverName;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double wallTimeSeconds = 0.0;
};

enum class Schedule { Geometric, Linear };

struct AnnealConfig {
  std::size_t sweeps = 2000;
  std::size_t restarts = 8;
  /// Unset temperatures are derived from the instance coefficients, see
  /// annealTemperatures().
  std::optional<double> tInitial;
  std::optional<double> tFinal;
  Schedule schedule = Schedule::Geometric;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless sweeps, restarts >= 1 and, when set,
  /// tInitial > tFinal > 0.
  void validate() const;
};

/// Hot temperature accepts the largest possible single-flip increase with
/// probability 1/2; cold temperature accepts the smallest nonzero
/// coefficient increase with probability 1/100.
std::pair<double, double> annealTemperatures(const QuboInstance& q);

struct HeuristicConfig {
  /// Restart 0 is greedy balanced seeding, the rest start at random.
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultExhaustiveMaxVars = 24;

/// Minimum over all k^n one-hot assignments. Ties resolve to the
/// lexicographically smallest producer vector. Throws CapacityExceeded when
/// n * k > maxVars.
SolveResult solveExhaustive(const QuboInstance& q,
                            std::size_t maxVars = kDefaultExhaustiveMaxVars);

/// Metropolis single-bit-flip annealing over all n * k variables, best of
/// restarts after decodeAndRepair. Deterministic in cfg.seed.
SolveResult solveAnneal(const QuboInstance& q, const AnnealConfig& cfg);

/// Relocate/swap local search directly on the cost function over feasible
/// assignments. The result is a local optimum: no single relocation or
/// pairwise swap lowers the cost.
SolveResult solveHeuristic(const Topology& topo,
                           std::span<const double> weights, std::size_t k,
                           const PenaltyConfig& penalties,
                           const HeuristicConfig& cfg = {});

/// Maps raw bits to a feasible assignment, node by node in index order.
/// A node with one set bit keeps it. A node with several keeps the set
/// producer that minimizes the energy given all other current bits; a node
/// with none takes the minimizing producer over all k. Ties go to the
/// lowest producer id.
Assignment decodeAndRepair(const QuboInstance& q,
                           std::span<const std::uint8_t> bits);

/// One-hot bits of `a` in the instance's variable layout.
BitVector encode(const Assignment& a, const QuboInstance& q);

/// Nodes whose bits are not exactly one-hot.
std::size_t oneHotViolations(const QuboInstance& q,
                             std::span<const std::uint8_t> bits);

}  // namespace dhfair
