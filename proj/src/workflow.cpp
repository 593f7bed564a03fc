#include "dhfair/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <json.hpp>
#include <thread>

#include "dhfair/error.hpp"
#include "dhfair/graph_matrices.hpp"
#include "dhfair/io.hpp"
#include "dhfair/random.hpp"
#include "dhfair/topology_io.hpp"

namespace dhfair {

using nlohmann::json;

std::string solverKindName(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exhaustive:
      return "exhaustive";
    case SolverKind::Anneal:
      return "anneal";
    case SolverKind::Heuristic:
      return "heuristic";
  }
  return "unknown";
}

SolverKind parseSolverKind(const std::string& name) {
  if (name == "exhaustive") return SolverKind::Exhaustive;
  if (name == "anneal") return SolverKind::Anneal;
  if (name == "heuristic") return SolverKind::Heuristic;
  throw InvalidArgument("unknown solver '" + name +
                        "' (valid: exhaustive, anneal, heuristic)");
}

SolveResult solveOnce(const Topology& topo, std::span<const double> weights,
                      std::size_t k, const PenaltyConfig& penalties,
                      const SolverSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case SolverKind::Exhaustive: {
      auto r = solveExhaustive(buildQubo(topo, weights, k, penalties),
                               spec.exhaustiveMaxVars);
      r.seed = seed;
      return r;
    }
    case SolverKind::Anneal: {
      AnnealConfig cfg = spec.anneal;
      cfg.seed = seed;
      return solveAnneal(buildQubo(topo, weights, k, penalties), cfg);
    }
    case SolverKind::Heuristic: {
      HeuristicConfig cfg = spec.heuristic;
      cfg.seed = seed;
      return solveHeuristic(topo, weights, k, penalties, cfg);
    }
  }
  throw InvalidArgument("unsupported solver");
}

void SweepConfig::validate(std::size_t nodes) const {
  if (maxProducers < 1) {
    throw InvalidArgument("maximum number of producers must be >= 1");
  }
  if (maxProducers > nodes) {
    throw InvalidArgument("maximum number of producers (" +
                          std::to_string(maxProducers) +
                          ") exceeds number of nodes (" +
                          std::to_string(nodes) + ")");
  }
  if (solvers.empty()) throw InvalidArgument("sweep needs at least one solver");
  if (!(kpiAlpha >= 0.0 && kpiAlpha <= 1.0)) {
    throw InvalidArgument("kpi alpha must lie in [0, 1]");
  }
  for (const auto& s : solvers) s.anneal.validate();
}

namespace {

std::string utcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t cellSeed(std::uint64_t base, std::size_t k, std::size_t solver) {
  return mixSeed(base ^ mixSeed((static_cast<std::uint64_t>(k) << 16) |
                                static_cast<std::uint64_t>(solver)));
}

struct Cell {
  std::size_t k = 0;
  std::size_t solver = 0;
  std::optional<SweepReport> report;
  std::optional<std::string> warning;
};

SweepResult sweepImpl(const Topology& topo, const WeightVector& weights,
                      const SweepConfig& cfg, std::string demandHash) {
  const std::size_t n = topo.nodeCount();
  cfg.validate(n);
  if (weights.size() != n) {
    throw InvalidArgument("weights cover " + std::to_string(weights.size()) +
                          " nodes but topology has " + std::to_string(n));
  }
  if (!topo.isConnected()) {
    throw InvalidArgument(
        "topology is disconnected; the distance index needs finite paths");
  }
  const Eigen::MatrixXd paths = allPairsShortestPaths(topo);

  std::vector<Cell> cells;
  for (std::size_t k = 1; k <= cfg.maxProducers; ++k) {
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
      cells.push_back({k, s, std::nullopt, std::nullopt});
    }
  }

  auto runCell = [&](Cell& cell) {
    const SolverSpec& spec = cfg.solvers[cell.solver];
    const std::uint64_t seed = cellSeed(cfg.seed, cell.k, cell.solver);
    try {
      const PenaltyConfig pen =
          cfg.penalty ? *cfg.penalty : defaultPenalties(topo, weights, cell.k);
      SolveResult r = solveOnce(topo, weights, cell.k, pen, spec, seed);
      SweepReport rep;
      rep.kpi = evaluateKpi(r, weights, paths, cfg.kpiAlpha);
      rep.assignment = std::move(r.assignment);
      rep.seed = seed;
      rep.iterations = r.iterations;
      rep.wallTimeSeconds = r.wallTimeSeconds;
      cell.report = std::move(rep);
    } catch (const Error& e) {
      cell.warning = std::string("skipped: ") + e.what();
    }
  };

  std::size_t threads = cfg.threads == 0
                            ? std::max(1U, std::thread::hardware_concurrency())
                            : cfg.threads;
  threads = std::min(threads, cells.size());
  if (threads <= 1) {
    for (auto& c : cells) runCell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          runCell(cells[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.label = cfg.label;
  result.maxProducers = cfg.maxProducers;
  result.kpiAlpha = cfg.kpiAlpha;
  for (auto& c : cells) {
    if (c.report) {
      result.reports.push_back(std::move(*c.report));
    } else {
      result.warnings.push_back(
          {c.k, cfg.solvers[c.solver].name(), c.warning.value_or("")});
    }
  }
  result.provenance.topologyHash = hexDigest(fnv1a(serializeTopology(topo)));
  result.provenance.demandHash = std::move(demandHash);
  // Thread count never changes results, so it stays out of the echo and
  // outputs match byte for byte across machines.
  SweepConfig echo = cfg;
  echo.threads = 1;
  result.provenance.configEcho = sweepConfigToJson(echo);
  result.provenance.timestamp = utcTimestamp();
  return result;
}

}  // namespace

SweepResult runSweep(const Topology& topo, const DemandMatrix& demands,
                     const SweepConfig& cfg) {
  const DemandMatrix aligned = demands.alignedTo(topo);
  return sweepImpl(topo, computeWeights(aligned), cfg,
                   hexDigest(fnv1a(serializeDemands(aligned))));
}

SweepResult runSweep(const Topology& topo, const WeightVector& weights,
                     const SweepConfig& cfg) {
  std::vector<std::string> labels;
  return sweepImpl(topo, weights, cfg,
                   hexDigest(fnv1a(serializeWeights(weights, labels))));
}

std::vector<ComparisonRow> compareTopologies(
    std::span<const SweepResult> sweeps) {
  std::vector<ComparisonRow> rows;
  if (sweeps.empty()) return rows;
  for (const auto& s : sweeps) {
    if (s.maxProducers != sweeps[0].maxProducers ||
        s.kpiAlpha != sweeps[0].kpiAlpha) {
      throw InvalidArgument(
          "sweeps must share the maximum producer count and kpi alpha");
    }
  }
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const auto& s = sweeps[i];
    const std::string name =
        s.label.empty() ? "sweep" + std::to_string(i) : s.label;
    for (const auto& r : s.reports) {
      rows.push_back({name, r.kpi.solverName, r.kpi.k, r.kpi.jain,
                      r.kpi.distanceIndex, r.kpi.kpi});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// JSON and text formats

namespace {

json penaltyToJson(const PenaltyConfig& p) {
  auto vec = [](const std::vector<double>& v) -> json {
    if (v.size() == 1) return v[0];
    return v;
  };
  return {{"beta", p.beta}, {"alpha", vec(p.alpha)}, {"gamma", vec(p.gamma)}};
}

json solverToJson(const SolverSpec& s) {
  json j = {{"name", s.name()}};
  switch (s.kind) {
    case SolverKind::Exhaustive:
      j["max_vars"] = s.exhaustiveMaxVars;
      break;
    case SolverKind::Anneal:
      j["sweeps"] = s.anneal.sweeps;
      j["restarts"] = s.anneal.restarts;
      j["schedule"] =
          s.anneal.schedule == Schedule::Geometric ? "geometric" : "linear";
      if (s.anneal.tInitial) {
        j["t_initial"] = *s.anneal.tInitial;
        j["t_final"] = *s.anneal.tFinal;
      }
      break;
    case SolverKind::Heuristic:
      j["restarts"] = s.heuristic.restarts;
      break;
  }
  return j;
}

void allowOnly(const json& obj, std::initializer_list<const char*> keys,
               const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* k) { return key == k; })) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
T getAs(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + "." + key + ": wrong type");
  }
}

std::vector<double> numberOrList(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array() && !j.empty() &&
      std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); })) {
    return j.get<std::vector<double>>();
  }
  throw ParseError(where + ": expected a number or a list of numbers");
}

SolverSpec solverFromJson(const json& j, const std::string& where) {
  SolverSpec s;
  if (j.is_string()) {
    s.kind = parseSolverKind(j.get<std::string>());
    return s;
  }
  if (!j.is_object() || !j.contains("name")) {
    throw ParseError(where + ": expected a solver name or object with 'name'");
  }
  s.kind = parseSolverKind(getAs<std::string>(j, "name", where));
  switch (s.kind) {
    case SolverKind::Exhaustive:
      allowOnly(j, {"name", "max_vars"}, where);
      if (j.contains("max_vars")) {
        s.exhaustiveMaxVars = getAs<std::size_t>(j, "max_vars", where);
      }
      break;
    case SolverKind::Anneal:
      allowOnly(j, {"name", "sweeps", "restarts", "schedule", "t_initial",
                    "t_final"},
                where);
      if (j.contains("sweeps")) s.anneal.sweeps = getAs<std::size_t>(j, "sweeps", where);
      if (j.contains("restarts")) {
        s.anneal.restarts = getAs<std::size_t>(j, "restarts", where);
      }
      if (j.contains("schedule")) {
        const auto name = getAs<std::string>(j, "schedule", where);
        if (name == "geometric") {
          s.anneal.schedule = Schedule::Geometric;
        } else if (name == "linear") {
          s.anneal.schedule = Schedule::Linear;
        } else {
          throw ParseError(where + ".schedule: expected geometric or linear");
        }
      }
      if (j.contains("t_initial")) {
        s.anneal.tInitial = getAs<double>(j, "t_initial", where);
      }
      if (j.contains("t_final")) s.anneal.tFinal = getAs<double>(j, "t_final", where);
      break;
    case SolverKind::Heuristic:
      allowOnly(j, {"name", "restarts"}, where);
      if (j.contains("restarts")) {
        s.heuristic.restarts = getAs<std::size_t>(j, "restarts", where);
      }
      break;
  }
  return s;
}

}  // namespace

std::string sweepConfigToJson(const SweepConfig& cfg) {
  json j;
  j["max_producers"] = cfg.maxProducers;
  json solvers = json::array();
  for (const auto& s : cfg.solvers) solvers.push_back(solverToJson(s));
  j["solvers"] = std::move(solvers);
  j["penalty"] = cfg.penalty ? penaltyToJson(*cfg.penalty) : json("auto");
  j["kpi_alpha"] = cfg.kpiAlpha;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  if (!cfg.label.empty()) j["label"] = cfg.label;
  return j.dump();
}

SweepConfig sweepConfigFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: malformed JSON: ") + e.what());
  }
  const std::string where = "config";
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  allowOnly(j, {"max_producers", "solvers", "penalty", "kpi_alpha", "seed",
                "threads", "label"},
            where);
  SweepConfig cfg;
  if (j.contains("max_producers")) {
    cfg.maxProducers = getAs<std::size_t>(j, "max_producers", where);
  }
  if (j.contains("solvers")) {
    if (!j["solvers"].is_array()) throw ParseError("config.solvers: expected a list");
    cfg.solvers.clear();
    for (std::size_t i = 0; i < j["solvers"].size(); ++i) {
      cfg.solvers.push_back(solverFromJson(
          j["solvers"][i], "config.solvers[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("penalty")) {
    const auto& p = j["penalty"];
    if (p.is_string() && p.get<std::string>() == "auto") {
      cfg.penalty.reset();
    } else if (p.is_object()) {
      allowOnly(p, {"beta", "alpha", "gamma"}, "config.penalty");
      PenaltyConfig pc;
      if (p.contains("beta")) pc.beta = getAs<double>(p, "beta", "config.penalty");
      if (p.contains("alpha")) pc.alpha = numberOrList(p["alpha"], "config.penalty.alpha");
      if (p.contains("gamma")) pc.gamma = numberOrList(p["gamma"], "config.penalty.gamma");
      cfg.penalty = pc;
    } else {
      throw ParseError("config.penalty: expected \"auto\" or an object");
    }
  }
  if (j.contains("kpi_alpha")) cfg.kpiAlpha = getAs<double>(j, "kpi_alpha", where);
  if (j.contains("seed")) cfg.seed = getAs<std::uint64_t>(j, "seed", where);
  if (j.contains("threads")) cfg.threads = getAs<std::size_t>(j, "threads", where);
  if (j.contains("label")) cfg.label = getAs<std::string>(j, "label", where);
  return cfg;
}

std::string solveResultToJson(const SolveResult& result, bool includeTiming) {
  json j;
  j["solver"] = result.solverName;
  j["k"] = result.assignment.k;
  j["assignment"] = result.assignment.producerOf;
  j["energy"] = result.energy;
  j["seed"] = result.seed;
  j["iterations"] = result.iterations;
  if (includeTiming) j["wall_time_s"] = result.wallTimeSeconds;
  return j.dump(2) + "\n";
}

std::string sweepToJson(const SweepResult& result, bool includeTiming) {
  json j;
  j["label"] = result.label;
  j["max_producers"] = result.maxProducers;
  j["kpi_alpha"] = result.kpiAlpha;
  json prov = {{"topology_hash", result.provenance.topologyHash},
               {"demand_hash", result.provenance.demandHash},
               {"tool_version", result.provenance.toolVersion}};
  prov["config"] = result.provenance.configEcho.empty()
                       ? json::object()
                       : json::parse(result.provenance.configEcho);
  if (includeTiming) prov["timestamp"] = result.provenance.timestamp;
  j["provenance"] = std::move(prov);
  json reports = json::array();
  for (const auto& r : result.reports) {
    json jr = {{"k", r.kpi.k},
               {"solver", r.kpi.solverName},
               {"jain", r.kpi.jain},
               {"distance_index", r.kpi.distanceIndex},
               {"kpi", r.kpi.kpi},
               {"kpi_alpha", r.kpi.kpiAlpha},
               {"energy", r.kpi.energy},
               {"seed", r.seed},
               {"iterations", r.iterations},
               {"assignment", r.assignment.producerOf}};
    if (includeTiming) jr["wall_time_s"] = r.wallTimeSeconds;
    reports.push_back(std::move(jr));
  }
  j["reports"] = std::move(reports);
  json warnings = json::array();
  for (const auto& w : result.warnings) {
    warnings.push_back({{"k", w.k}, {"solver", w.solver}, {"message", w.message}});
  }
  j["warnings"] = std::move(warnings);
  return j.dump(2) + "\n";
}

SweepResult sweepFromJson(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sweep: malformed JSON: ") + e.what());
  }
  try {
    SweepResult r;
    r.label = j.at("label").get<std::string>();
    r.maxProducers = j.at("max_producers").get<std::size_t>();
    r.kpiAlpha = j.at("kpi_alpha").get<double>();
    const auto& prov = j.at("provenance");
    r.provenance.topologyHash = prov.at("topology_hash").get<std::string>();
    r.provenance.demandHash = prov.at("demand_hash").get<std::string>();
    r.provenance.toolVersion = prov.at("tool_version").get<std::string>();
    r.provenance.configEcho = prov.at("config").dump();
    if (prov.contains("timestamp")) {
      r.provenance.timestamp = prov["timestamp"].get<std::string>();
    }
    for (const auto& jr : j.at("reports")) {
      SweepReport rep;
      rep.kpi.k = jr.at("k").get<std::size_t>();
      rep.kpi.solverName = jr.at("solver").get<std::string>();
      rep.kpi.jain = jr.at("jain").get<double>();
      rep.kpi.distanceIndex = jr.at("distance_index").get<double>();
      rep.kpi.kpi = jr.at("kpi").get<double>();
      rep.kpi.kpiAlpha = jr.at("kpi_alpha").get<double>();
      rep.kpi.energy = jr.at("energy").get<double>();
      rep.seed = jr.at("seed").get<std::uint64_t>();
      rep.iterations = jr.at("iterations").get<std::size_t>();
      rep.assignment = Assignment(
          jr.at("assignment").get<std::vector<std::size_t>>(), rep.kpi.k);
      if (jr.contains("wall_time_s")) {
        rep.wallTimeSeconds = jr["wall_time_s"].get<double>();
      }
      r.reports.push_back(std::move(rep));
    }
    for (const auto& jw : j.at("warnings")) {
      r.warnings.push_back({jw.at("k").get<std::size_t>(),
                            jw.at("solver").get<std::string>(),
                            jw.at("message").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep: ") + e.what());
  }
}

std::string sweepToCsv(const SweepResult& result) {
  std::string out = "k,solver,jain,distance_index,kpi,energy\n";
  for (const auto& r : result.reports) {
    out += std::to_string(r.kpi.k) + ',' + r.kpi.solverName + ',' +
           formatDouble(r.kpi.jain) + ',' + formatDouble(r.kpi.distanceIndex) +
           ',' + formatDouble(r.kpi.kpi) + ',' + formatDouble(r.kpi.energy) +
           '\n';
  }
  return out;
}

std::map<std::string, std::string> sweepToGnuplot(const SweepResult& result) {
  std::vector<std::string> solvers;
  for (const auto& r : result.reports) {
    if (std::find(solvers.begin(), solvers.end(), r.kpi.solverName) ==
        solvers.end()) {
      solvers.push_back(r.kpi.solverName);
    }
  }
  std::map<std::string, std::string> files;
  const std::pair<const char*, double KpiReport::*> columns[] = {
      {"jain", &KpiReport::jain},
      {"distance", &KpiReport::distanceIndex},
      {"kpi", &KpiReport::kpi}};
  for (const auto& [name, member] : columns) {
    std::string out;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      if (s) out += "\n\n";
      out += "# " + (result.label.empty() ? std::string("sweep") : result.label) +
             " " + solvers[s] + " k " + name + "\n";
      for (const auto& r : result.reports) {
        if (r.kpi.solverName != solvers[s]) continue;
        out += std::to_string(r.kpi.k) + ' ' + formatDouble(r.kpi.*member) + '\n';
      }
    }
    files[name] = std::move(out);
  }
  return files;
}

std::string comparisonToCsv(std::span<const ComparisonRow> rows) {
  std::string out = "topology,solver,k,jain,distance_index,kpi\n";
  for (const auto& r : rows) {
    out += r.topology + ',' + r.solver + ',' + std::to_string(r.k) + ',' +
           formatDouble(r.jain) + ',' + formatDouble(r.distanceIndex) + ',' +
           formatDouble(r.kpi) + '\n';
  }
  return out;
}

}  // namespace dhfair
