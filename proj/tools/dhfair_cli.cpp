// dhfair command-line tool.
//
// Precedence for sweep and solve settings: built-in defaults, then the
// --config file, then explicit flags. Outputs without -o land in
// $DHFAIR_OUTPUT_DIR (or the working directory) under a fixed name.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dhfair/demand.hpp"
#include "dhfair/error.hpp"
#include "dhfair/generators.hpp"
#include "dhfair/io.hpp"
#include "dhfair/qubo.hpp"
#include "dhfair/topology_io.hpp"
#include "dhfair/workflow.hpp"

namespace fs = std::filesystem;
using namespace dhfair;

namespace {

constexpr std::uint64_t kDefaultSeed = 20150101;

fs::path outputDir() {
  if (const char* dir = std::getenv("DHFAIR_OUTPUT_DIR"); dir && *dir) {
    return dir;
  }
  return ".";
}

// "-" writes to stdout. Empty means the default name in the output dir.
void emit(const std::string& target, const std::string& fallback,
          const std::string& contents) {
  if (target == "-") {
    std::cout << contents;
    return;
  }
  const fs::path path = target.empty() ? outputDir() / fallback : fs::path(target);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  writeFileAtomic(path, contents);
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

WeightVector weightsFor(const Topology& topo, const std::string& path) {
  WeightVector w = loadWeights(path);
  if (w.size() != topo.nodeCount()) {
    throw InvalidArgument("weights file has " + std::to_string(w.size()) +
                          " entries but topology has " +
                          std::to_string(topo.nodeCount()) + " nodes");
  }
  return w;
}

struct PenaltyFlags {
  std::optional<double> beta;
  std::optional<double> alpha;
  std::optional<double> gamma;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "distance objective weight");
    cmd->add_option("--alpha", alpha, "balance penalty (all producers)");
    cmd->add_option("--gamma", gamma, "one-hot penalty (all nodes)");
  }

  // Unset entries fall back to `base`, or to the automatic values.
  PenaltyConfig resolve(const Topology& topo, const WeightVector& w,
                        std::size_t k,
                        const std::optional<PenaltyConfig>& base) const {
    PenaltyConfig p = base ? *base : defaultPenalties(topo, w, k);
    if (beta) p.beta = *beta;
    if (alpha) p.alpha = {*alpha};
    if (gamma) p.gamma = {*gamma};
    return p;
  }
};

struct AnnealFlags {
  std::optional<std::size_t> sweeps;
  std::optional<std::size_t> restarts;
  std::optional<std::string> schedule;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sweeps", sweeps, "annealing sweeps per restart");
    cmd->add_option("--restarts", restarts, "restarts (anneal and heuristic)");
    cmd->add_option("--schedule", schedule, "geometric or linear")
        ->check(CLI::IsMember({"geometric", "linear"}));
  }

  void apply(SolverSpec& s) const {
    if (sweeps) s.anneal.sweeps = *sweeps;
    if (restarts) {
      s.anneal.restarts = *restarts;
      s.heuristic.restarts = *restarts;
    }
    if (schedule) {
      s.anneal.schedule =
          *schedule == "linear" ? Schedule::Linear : Schedule::Geometric;
    }
  }
};

SweepConfig loadConfig(const std::string& path) {
  if (path.empty()) return SweepConfig{};
  return sweepConfigFromJson(readTextFile(path));
}

// ---- generate ------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::size_t nodes = 0;
  std::size_t branching = 2;
  std::size_t chords = 0;
  double distMin = 1.0;
  double distMax = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
};

void runGenerate(const GenerateArgs& a) {
  if (!(a.distMin > 0.0) || a.distMax < a.distMin) {
    throw InvalidArgument("need 0 < --dist-min <= --dist-max");
  }
  const DistanceRule rule{a.distMin, a.distMax, a.seed};
  const Topology topo = a.kind == "tree"
                            ? generateTree(a.nodes, a.branching, rule)
                            : generateRing(a.nodes, a.chords, rule);
  emit(a.output, a.kind + ".json", serializeTopology(topo));
}

// ---- demand --------------------------------------------------------------

struct DemandArgs {
  std::string topology;
  std::size_t timesteps = 8760;
  double spread = 0.5;
  std::size_t large = 0;
  double largeFactor = 4.0;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
};

void runDemand(const DemandArgs& a) {
  const Topology topo = loadTopology(a.topology);
  std::vector<std::string> labels;
  for (NodeId i = 0; i < topo.nodeCount(); ++i) {
    labels.push_back(topo.displayLabel(i));
  }
  SyntheticDemandOptions opt;
  opt.timesteps = a.timesteps;
  opt.peakSpread = a.spread;
  opt.largeConsumers = a.large;
  opt.largeFactor = a.largeFactor;
  opt.seed = a.seed;
  emit(a.output, "demand.csv", serializeDemands(syntheticDemand(labels, opt)));
}

// ---- weights -------------------------------------------------------------

struct WeightsArgs {
  std::string demands;
  std::string topology;
  std::string output;
};

void runWeights(const WeightsArgs& a) {
  DemandMatrix d = loadDemands(a.demands);
  if (!a.topology.empty()) d = d.alignedTo(loadTopology(a.topology));
  emit(a.output, "weights.csv", serializeWeights(computeWeights(d), d.labels()));
}

// ---- qubo ----------------------------------------------------------------

struct QuboArgs {
  std::string topology;
  std::string weights;
  std::size_t k = 1;
  PenaltyFlags penalty;
  std::string output;
};

void runQubo(const QuboArgs& a) {
  const Topology topo = loadTopology(a.topology);
  const WeightVector w = weightsFor(topo, a.weights);
  const QuboInstance q =
      buildQubo(topo, w, a.k, a.penalty.resolve(topo, w, a.k, std::nullopt));
  const fs::path path =
      a.output.empty() ? outputDir() / "qubo.txt" : fs::path(a.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  exportQubo(q, path);
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string topology;
  std::string weights;
  std::size_t k = 1;
  std::string solver;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> maxVars;
  PenaltyFlags penalty;
  AnnealFlags anneal;
  bool timing = false;
  std::string output;
};

void runSolve(const SolveArgs& a) {
  const SweepConfig cfg = loadConfig(a.config);
  // Solver: flag, else the first configured one. A flag that names a solver
  // present in the config picks up that entry's parameters.
  SolverSpec spec = cfg.solvers.empty() ? SolverSpec{} : cfg.solvers.front();
  if (!a.solver.empty()) {
    const SolverKind kind = parseSolverKind(a.solver);
    spec = SolverSpec{};
    spec.kind = kind;
    for (const auto& s : cfg.solvers) {
      if (s.kind == kind) {
        spec = s;
        break;
      }
    }
  }
  a.anneal.apply(spec);
  if (a.maxVars) spec.exhaustiveMaxVars = *a.maxVars;
  spec.anneal.validate();

  const Topology topo = loadTopology(a.topology);
  const WeightVector w = weightsFor(topo, a.weights);
  const PenaltyConfig pen = a.penalty.resolve(topo, w, a.k, cfg.penalty);
  const std::uint64_t seed =
      a.seed ? *a.seed : (a.config.empty() ? kDefaultSeed : cfg.seed);
  const SolveResult r = solveOnce(topo, w, a.k, pen, spec, seed);
  emit(a.output, "solve.json", solveResultToJson(r, a.timing));
}

// ---- sweep ---------------------------------------------------------------

struct SweepArgs {
  std::string topology;
  std::string demands;
  std::string weights;
  std::string config;
  std::optional<std::size_t> maxProducers;
  std::optional<std::string> solvers;
  std::optional<double> kpiAlpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> label;
  AnnealFlags anneal;
  std::string format = "json";
  bool timing = false;
  std::string output;
};

void runSweepCmd(const SweepArgs& a) {
  if (a.demands.empty() == a.weights.empty()) {
    throw InvalidArgument("give exactly one of --demands or --weights");
  }
  SweepConfig cfg = loadConfig(a.config);
  if (a.config.empty()) cfg.seed = kDefaultSeed;
  if (a.maxProducers) cfg.maxProducers = *a.maxProducers;
  if (a.solvers) {
    cfg.solvers.clear();
    for (const auto& name : splitList(*a.solvers)) {
      SolverSpec s;
      s.kind = parseSolverKind(name);
      cfg.solvers.push_back(s);
    }
  }
  for (auto& s : cfg.solvers) a.anneal.apply(s);
  if (a.kpiAlpha) cfg.kpiAlpha = *a.kpiAlpha;
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;

  const Topology topo = loadTopology(a.topology);
  if (a.label) {
    cfg.label = *a.label;
  } else if (cfg.label.empty()) {
    cfg.label = fs::path(a.topology).stem().string();
  }

  SweepResult result;
  if (!a.demands.empty()) {
    result = runSweep(topo, loadDemands(a.demands).alignedTo(topo), cfg);
  } else {
    result = runSweep(topo, weightsFor(topo, a.weights), cfg);
  }
  for (const auto& w : result.warnings) {
    std::cerr << "warning: k=" << w.k << " " << w.solver << ": " << w.message
              << "\n";
  }

  if (a.format == "json") {
    emit(a.output, "sweep.json", sweepToJson(result, a.timing));
  } else if (a.format == "csv") {
    emit(a.output, "sweep.csv", sweepToCsv(result));
  } else {
    // -o names a directory here; one file per index.
    const fs::path dir = a.output.empty() ? outputDir() : fs::path(a.output);
    fs::create_directories(dir);
    for (const auto& [name, text] : sweepToGnuplot(result)) {
      writeFileAtomic(dir / (name + ".dat"), text);
    }
  }
}

// ---- compare -------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> inputs;
  std::string output;
};

void runCompare(const CompareArgs& a) {
  std::vector<SweepResult> sweeps;
  for (const auto& path : a.inputs) {
    sweeps.push_back(sweepFromJson(readTextFile(path)));
    if (sweeps.back().label.empty()) {
      sweeps.back().label = fs::path(path).stem().string();
    }
  }
  const auto rows = compareTopologies(sweeps);
  emit(a.output, "comparison.csv", comparisonToCsv(rows));
}

std::string oneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness of producer assignments in district heating networks"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic topology");
  generate->add_option("kind", gen.kind, "tree or ring")
      ->required()
      ->check(CLI::IsMember({"tree", "ring"}));
  generate->add_option("--nodes,-n", gen.nodes, "node count")
      ->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--branching", gen.branching, "tree fan-out")
      ->check(CLI::PositiveNumber);
  generate->add_option("--chords", gen.chords, "extra ring edges");
  generate->add_option("--dist-min", gen.distMin, "shortest pipe length");
  generate->add_option("--dist-max", gen.distMax, "longest pipe length");
  generate->add_option("--seed", gen.seed, "distance and chord seed");
  generate->add_option("-o,--output", gen.output, "topology file");
  generate->callback([&] { runGenerate(gen); });

  DemandArgs dem;
  auto* demand =
      app.add_subcommand("demand", "write seeded synthetic demand profiles");
  demand->add_option("--topology,-t", dem.topology, "topology file")
      ->required();
  demand->add_option("--timesteps", dem.timesteps)->check(CLI::PositiveNumber);
  demand->add_option("--spread", dem.spread, "log-normal spread of peaks");
  demand->add_option("--large", dem.large, "number of large consumers");
  demand->add_option("--large-factor", dem.largeFactor);
  demand->add_option("--seed", dem.seed);
  demand->add_option("-o,--output", dem.output, "demand CSV");
  demand->callback([&] { runDemand(dem); });

  WeightsArgs wts;
  auto* weights = app.add_subcommand("weights", "demand CSV to node weights");
  weights->add_option("--demands,-d", wts.demands, "demand CSV")->required();
  weights->add_option("--topology,-t", wts.topology,
                      "reorder columns to this topology");
  weights->add_option("-o,--output", wts.output, "weights CSV");
  weights->callback([&] { runWeights(wts); });

  QuboArgs qb;
  auto* qubo = app.add_subcommand("qubo", "export the QUBO for one k");
  qubo->add_option("--topology,-t", qb.topology)->required();
  qubo->add_option("--weights,-w", qb.weights)->required();
  qubo->add_option("--k,-k", qb.k, "producer count")
      ->required()
      ->check(CLI::PositiveNumber);
  qb.penalty.attach(qubo);
  qubo->add_option("-o,--output", qb.output,
                   "coordinate file; the map goes to <output>.map");
  qubo->callback([&] { runQubo(qb); });

  SolveArgs sv;
  auto* solve = app.add_subcommand("solve", "solve one k and print the result");
  solve->add_option("--topology,-t", sv.topology)->required();
  solve->add_option("--weights,-w", sv.weights)->required();
  solve->add_option("--k,-k", sv.k)->required()->check(CLI::PositiveNumber);
  solve->add_option("--solver,-s", sv.solver, "exhaustive, anneal or heuristic");
  solve->add_option("--config,-c", sv.config, "JSON run config");
  solve->add_option("--seed", sv.seed);
  solve->add_option("--max-vars", sv.maxVars, "exhaustive size cap");
  sv.penalty.attach(solve);
  sv.anneal.attach(solve);
  solve->add_flag("--timing", sv.timing, "include wall time in the output");
  solve->add_option("-o,--output", sv.output, "result JSON, - for stdout");
  solve->callback([&] { runSolve(sv); });

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "KPI sweep over k = 1..max");
  sweep->add_option("--topology,-t", sw.topology)->required();
  sweep->add_option("--demands,-d", sw.demands, "demand CSV");
  sweep->add_option("--weights,-w", sw.weights, "precomputed weights CSV");
  sweep->add_option("--config,-c", sw.config, "JSON run config");
  sweep->add_option("--max-producers,-k", sw.maxProducers)
      ->check(CLI::PositiveNumber);
  sweep->add_option("--solvers,-s", sw.solvers, "comma-separated solver names");
  sweep->add_option("--kpi-alpha", sw.kpiAlpha)->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--seed", sw.seed);
  sweep->add_option("--threads", sw.threads, "worker cap, 0 for all cores");
  sweep->add_option("--label", sw.label, "name used in comparisons");
  sw.anneal.attach(sweep);
  sweep->add_option("--format,-f", sw.format)
      ->check(CLI::IsMember({"json", "csv", "gnuplot"}));
  sweep->add_flag("--timing", sw.timing, "include wall times in JSON");
  sweep->add_option("-o,--output", sw.output,
                    "output file (directory for gnuplot)");
  sweep->callback([&] { runSweepCmd(sw); });

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "tabulate several sweeps");
  compare->add_option("inputs", cmp.inputs, "sweep JSON files")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("-o,--output", cmp.output, "comparison CSV");
  compare->callback([&] { runCompare(cmp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << oneLine(e.what()) << " (try --help)\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << oneLine(e.what()) << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << oneLine(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << oneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}
