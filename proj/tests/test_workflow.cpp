#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "dhfair/error.hpp"
#include "dhfair/generators.hpp"
#include "dhfair/workflow.hpp"

using namespace dhfair;

namespace {

SolverSpec exhaustive(std::size_t maxVars = 32) {
  SolverSpec s;
  s.kind = SolverKind::Exhaustive;
  s.exhaustiveMaxVars = maxVars;
  return s;
}

SolverSpec heuristic() {
  SolverSpec s;
  s.kind = SolverKind::Heuristic;
  return s;
}

SolverSpec quickAnneal() {
  SolverSpec s;
  s.anneal.sweeps = 200;
  s.anneal.restarts = 2;
  return s;
}

WeightVector uniform(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0 / n));
}

}  // namespace

TEST_CASE("solver names") {
  CHECK(parseSolverKind("anneal") == SolverKind::Anneal);
  CHECK(solverKindName(SolverKind::Heuristic) == "heuristic");
  CHECK_THROWS_WITH_AS(parseSolverKind("qpu"),
                       doctest::Contains("exhaustive, anneal, heuristic"),
                       InvalidArgument);
}

TEST_CASE("single producer sweep") {
  SweepConfig cfg;
  cfg.maxProducers = 1;
  cfg.solvers = {quickAnneal()};
  const auto r = runSweep(generateRing(6, 1), uniform(6), cfg);
  REQUIRE(r.reports.size() == 1);
  CHECK(r.reports[0].kpi.jain == 1.0);
  CHECK(r.reports[0].kpi.distanceIndex == 0.0);
  CHECK(r.reports[0].kpi.kpi == 0.5);
  CHECK(r.warnings.empty());
}

TEST_CASE("exhaustive sweep on an 8-node ring") {
  SweepConfig cfg;
  cfg.maxProducers = 4;
  cfg.solvers = {exhaustive()};
  const auto r = runSweep(generateRing(8, 0), uniform(8), cfg);
  REQUIRE(r.reports.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.reports[i].kpi.k == i + 1);
  CHECK(r.reports[0].kpi.jain == 1.0);
  CHECK(r.reports[1].kpi.jain == 1.0);
  CHECK(r.reports[3].kpi.jain == 1.0);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(r.reports[i].kpi.distanceIndex > r.reports[i - 1].kpi.distanceIndex);
  }
  for (const auto& rep : r.reports) {
    CHECK(rep.kpi.kpi == rep.kpi.kpiAlpha * rep.kpi.jain +
                             (1 - rep.kpi.kpiAlpha) * rep.kpi.distanceIndex);
  }
}

TEST_CASE("sweeps are reproducible and thread-count independent") {
  const Topology t = generateRing(10, 2, DistanceRule::uniform(0.5, 2.0, 4));
  SyntheticDemandOptions opt;
  opt.timesteps = 48;
  opt.seed = 3;
  std::vector<std::string> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(std::to_string(i));
  const auto demand = syntheticDemand(labels, opt);

  SweepConfig cfg;
  cfg.maxProducers = 5;
  cfg.solvers = {quickAnneal(), heuristic()};
  cfg.seed = 11;
  const auto a = runSweep(t, demand, cfg);
  const auto b = runSweep(t, demand, cfg);
  cfg.threads = 4;
  const auto c = runSweep(t, demand, cfg);
  CHECK(sweepToCsv(a) == sweepToCsv(b));
  CHECK(sweepToCsv(a) == sweepToCsv(c));
  CHECK(sweepToJson(a) == sweepToJson(c));
  CHECK(a.reports.size() == 10);
  // Ordered by k, then by solver position.
  CHECK(a.reports[0].kpi.solverName == "anneal");
  CHECK(a.reports[1].kpi.solverName == "heuristic");
  CHECK(a.reports[9].kpi.k == 5);
}

TEST_CASE("oversized exhaustive cells become warnings") {
  SweepConfig cfg;
  cfg.maxProducers = 3;
  cfg.solvers = {exhaustive(24), heuristic()};
  const auto r = runSweep(generateRing(10, 0), uniform(10), cfg);
  // n = 10: k = 3 needs 30 variables.
  CHECK(r.reports.size() == 5);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].k == 3);
  CHECK(r.warnings[0].solver == "exhaustive");
  CHECK(r.warnings[0].message.find("skipped") != std::string::npos);
}

TEST_CASE("sweep input errors") {
  SweepConfig cfg;
  cfg.maxProducers = 2;
  const Topology split = Topology::withNodeCount(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(runSweep(split, uniform(4), cfg), InvalidArgument);
  CHECK_THROWS_AS(runSweep(generateRing(5, 0), uniform(4), cfg), InvalidArgument);
  cfg.maxProducers = 6;
  CHECK_THROWS_AS(runSweep(generateRing(5, 0), uniform(5), cfg), InvalidArgument);
  cfg.maxProducers = 0;
  CHECK_THROWS_AS(runSweep(generateRing(5, 0), uniform(5), cfg), InvalidArgument);
  cfg.maxProducers = 2;
  cfg.kpiAlpha = 1.5;
  CHECK_THROWS_AS(runSweep(generateRing(5, 0), uniform(5), cfg), InvalidArgument);
}

TEST_CASE("provenance") {
  SweepConfig cfg;
  cfg.maxProducers = 2;
  cfg.solvers = {heuristic()};
  const auto a = runSweep(generateRing(6, 0), uniform(6), cfg);
  const auto b = runSweep(generateRing(6, 1), uniform(6), cfg);
  CHECK(a.provenance.toolVersion == kToolVersion);
  CHECK(!a.provenance.topologyHash.empty());
  CHECK(a.provenance.topologyHash != b.provenance.topologyHash);
  CHECK(a.provenance.demandHash == b.provenance.demandHash);
  CHECK(sweepConfigFromJson(a.provenance.configEcho).maxProducers == 2);
  CHECK(a.provenance.timestamp.size() == 20);

  const auto plain = nlohmann::json::parse(sweepToJson(a));
  CHECK(!plain["provenance"].contains("timestamp"));
  const auto timed = nlohmann::json::parse(sweepToJson(a, true));
  CHECK(timed["provenance"].contains("timestamp"));
}

TEST_CASE("comparison table") {
  SweepConfig cfg;
  cfg.maxProducers = 3;
  cfg.solvers = {heuristic()};
  const auto w = uniform(8);
  cfg.label = "tree";
  const auto tree = runSweep(generateTree(8, 2), w, cfg);
  cfg.label = "ring";
  const auto ring = runSweep(generateRing(8, 1), w, cfg);

  const std::vector<SweepResult> one{tree};
  const auto rows1 = compareTopologies(one);
  REQUIRE(rows1.size() == tree.reports.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].topology == "tree");
    CHECK(rows1[i].k == tree.reports[i].kpi.k);
    CHECK(rows1[i].kpi == tree.reports[i].kpi.kpi);
  }

  const std::vector<SweepResult> both{tree, ring};
  const auto rows = compareTopologies(both);
  CHECK(rows.size() == 6);
  std::set<std::string> labels;
  std::set<std::size_t> ks;
  for (const auto& r : rows) {
    labels.insert(r.topology);
    ks.insert(r.k);
  }
  CHECK(labels == std::set<std::string>{"tree", "ring"});
  CHECK(ks == std::set<std::size_t>{1, 2, 3});
  CHECK(comparisonToCsv(rows).rfind("topology,solver,k,jain,distance_index,kpi\n", 0) == 0);

  auto other = ring;
  other.kpiAlpha = 0.3;
  const std::vector<SweepResult> bad{tree, other};
  CHECK_THROWS_AS(compareTopologies(bad), InvalidArgument);
  other = ring;
  other.maxProducers = 4;
  const std::vector<SweepResult> bad2{tree, other};
  CHECK_THROWS_AS(compareTopologies(bad2), InvalidArgument);
}

TEST_CASE("output formats") {
  SweepConfig cfg;
  cfg.maxProducers = 4;
  cfg.solvers = {quickAnneal(), heuristic()};
  cfg.label = "demo";
  const auto r = runSweep(generateRing(8, 1), uniform(8), cfg);

  const std::string csv = sweepToCsv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,solver,jain,distance_index,kpi,energy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);

  const auto plots = sweepToGnuplot(r);
  CHECK(plots.size() == 3);
  CHECK(plots.count("jain") == 1);
  CHECK(plots.count("distance") == 1);
  CHECK(plots.count("kpi") == 1);

  const auto back = sweepFromJson(sweepToJson(r));
  CHECK(back.label == "demo");
  CHECK(back.maxProducers == 4);
  REQUIRE(back.reports.size() == r.reports.size());
  for (std::size_t i = 0; i < back.reports.size(); ++i) {
    CHECK(back.reports[i].kpi.kpi == r.reports[i].kpi.kpi);
    CHECK(back.reports[i].kpi.jain == r.reports[i].kpi.jain);
    CHECK(back.reports[i].assignment == r.reports[i].assignment);
  }
  CHECK(sweepToJson(back) == sweepToJson(r));
  CHECK_THROWS_AS(sweepFromJson("{"), ParseError);
}

TEST_CASE("config JSON") {
  const auto cfg = sweepConfigFromJson(R"({
    "max_producers": 5,
    "solvers": ["heuristic",
                {"name": "anneal", "sweeps": 100, "restarts": 3,
                 "schedule": "linear", "t_initial": 10, "t_final": 0.1},
                {"name": "exhaustive", "max_vars": 20}],
    "penalty": {"beta": 2, "alpha": [1, 2], "gamma": 7},
    "kpi_alpha": 0.25, "seed": 9, "threads": 2, "label": "x"})");
  CHECK(cfg.maxProducers == 5);
  REQUIRE(cfg.solvers.size() == 3);
  CHECK(cfg.solvers[1].anneal.sweeps == 100);
  CHECK(cfg.solvers[1].anneal.schedule == Schedule::Linear);
  CHECK(cfg.solvers[1].anneal.tInitial == 10.0);
  CHECK(cfg.solvers[2].exhaustiveMaxVars == 20);
  REQUIRE(cfg.penalty.has_value());
  CHECK(cfg.penalty->alpha == std::vector<double>{1, 2});
  CHECK(cfg.penalty->gamma == std::vector<double>{7});
  CHECK(cfg.kpiAlpha == 0.25);

  const auto again = sweepConfigFromJson(sweepConfigToJson(cfg));
  CHECK(sweepConfigToJson(again) == sweepConfigToJson(cfg));

  CHECK_THROWS_AS(sweepConfigFromJson(R"({"max_producer": 3})"), ParseError);
  CHECK_THROWS_AS(sweepConfigFromJson(R"({"solvers": [{"name": "anneal", "tries": 1}]})"),
                  ParseError);
  CHECK_THROWS_AS(sweepConfigFromJson(R"({"solvers": ["metis"]})"), InvalidArgument);
  CHECK_THROWS_AS(sweepConfigFromJson(R"({"seed": "x"})"), ParseError);
  CHECK(!sweepConfigFromJson(R"({"penalty": "auto"})").penalty.has_value());
}
