#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhfair/demand.hpp"
#include "dhfair/fairness.hpp"
#include "dhfair/qubo.hpp"
#include "dhfair/solvers.hpp"
#include "dhfair/topology.hpp"

namespace dhfair {

inline constexpr const char* kToolVersion = "0.3.0";

enum class SolverKind { Exhaustive, Anneal, Heuristic };

std::string solverKindName(SolverKind kind);
/// Throws InvalidArgument listing the valid names.
SolverKind parseSolverKind(const std::string& name);

struct SolverSpec {
  SolverKind kind = SolverKind::Anneal;
  AnnealConfig anneal;
  HeuristicConfig heuristic;
  std::size_t exhaustiveMaxVars = kDefaultExhaustiveMaxVars;

  std::string name() const { return solverKindName(kind); }
};

/// Builds the QUBO for one k and runs one solver on it. Seeds inside
/// `spec` are replaced by `seed`.
SolveResult solveOnce(const Topology& topo, std::span<const double> weights,
                      std::size_t k, const PenaltyConfig& penalties,
                      const SolverSpec& spec, std::uint64_t seed);

struct SweepConfig {
  std::size_t maxProducers = 1;
  std::vector<SolverSpec> solvers{SolverSpec{}};
  /// Unset means defaultPenalties() per k.
  std::optional<PenaltyConfig> penalty;
  double kpiAlpha = 0.5;
  std::uint64_t seed = 0;
  /// Worker threads for independent (k, solver) cells; 0 means hardware.
  std::size_t threads = 1;
  std::string label;

  void validate(std::size_t nodes) const;
};

struct SweepReport {
  KpiReport kpi;
  Assignment assignment;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double wallTimeSeconds = 0.0;
};

struct SweepWarning {
  std::size_t k = 0;
  std::string solver;
  std::string message;
};

struct Provenance {
  std::string topologyHash;
  std::string demandHash;
  std::string configEcho;  // compact JSON of the SweepConfig
  std::string timestamp;   // UTC, ISO 8601
  std::string toolVersion = kToolVersion;
};

struct SweepResult {
  std::string label;
  std::size_t maxProducers = 0;
  double kpiAlpha = 0.5;
  /// Ordered by (k, position of the solver in the config).
  std::vector<SweepReport> reports;
  std::vector<SweepWarning> warnings;
  Provenance provenance;
};

/// For k = 1..maxProducers and each configured solver: build the QUBO,
/// solve, score. Solver failures become warnings, never exceptions.
/// Throws InvalidArgument for a disconnected topology or a size mismatch.
SweepResult runSweep(const Topology& topo, const DemandMatrix& demands,
                     const SweepConfig& cfg);
SweepResult runSweep(const Topology& topo, const WeightVector& weights,
                     const SweepConfig& cfg);

struct ComparisonRow {
  std::string topology;
  std::string solver;
  std::size_t k = 0;
  double jain = 0.0;
  double distanceIndex = 0.0;
  double kpi = 0.0;
};

/// Long-format table over several sweeps. Throws InvalidArgument when the
/// sweeps disagree on maxProducers or kpiAlpha.
std::vector<ComparisonRow> compareTopologies(
    std::span<const SweepResult> sweeps);

// Output formats.
std::string sweepToJson(const SweepResult& result, bool includeTiming = false);
SweepResult sweepFromJson(std::string_view text);
/// Columns: k,solver,jain,distance_index,kpi,energy
std::string sweepToCsv(const SweepResult& result);
/// Files "jain", "distance", "kpi": one gnuplot data block per solver
/// (blocks separated by two blank lines), each line `k value`.
std::map<std::string, std::string> sweepToGnuplot(const SweepResult& result);
std::string comparisonToCsv(std::span<const ComparisonRow> rows);

std::string solveResultToJson(const SolveResult& result,
                              bool includeTiming = false);

std::string sweepConfigToJson(const SweepConfig& cfg);
/// Strict parse: unknown keys throw ParseError.
SweepConfig sweepConfigFromJson(std::string_view text);

}  // namespace dhfair
