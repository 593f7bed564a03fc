#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dhfair/demand.hpp"
#include "dhfair/error.hpp"
#include "dhfair/fairness.hpp"
#include "dhfair/generators.hpp"
#include "dhfair/graph_matrices.hpp"
#include "dhfair/qubo.hpp"
#include "dhfair/solvers.hpp"
#include "dhfair/topology_io.hpp"
#include "dhfair/workflow.hpp"

namespace py = pybind11;
using namespace dhfair;

namespace {

DemandMatrix demandFromArray(std::vector<std::string> labels,
                             py::array_t<double, py::array::c_style | py::array::forcecast> values) {
  if (values.ndim() != 2) throw InvalidArgument("demand array must be 2-D (timesteps x nodes)");
  if (static_cast<std::size_t>(values.shape(1)) != labels.size()) {
    throw InvalidArgument("demand array has " + std::to_string(values.shape(1)) +
                          " columns but " + std::to_string(labels.size()) + " labels");
  }
  const auto t = static_cast<std::size_t>(values.shape(0));
  std::vector<double> flat(values.data(), values.data() + values.size());
  return DemandMatrix(std::move(labels), t, std::move(flat));
}

py::array_t<double> demandToArray(const DemandMatrix& d) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(d.timesteps()),
                                                  static_cast<py::ssize_t>(d.nodeCount())});
  std::copy(d.values().begin(), d.values().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Producer-assignment fairness for district heating networks";
  m.attr("__version__") = kToolVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<CapacityExceeded>(m, "CapacityExceeded", base.ptr());

  // graph-core
  py::class_<Node>(m, "Node")
      .def(py::init([](std::string label, std::optional<double> x, std::optional<double> y) {
             return Node{std::move(label), x, y};
           }),
           py::arg("label") = "", py::arg("x") = py::none(), py::arg("y") = py::none())
      .def_readwrite("label", &Node::label)
      .def_readwrite("x", &Node::x)
      .def_readwrite("y", &Node::y);

  py::class_<Edge>(m, "Edge")
      .def(py::init([](NodeId a, NodeId b, double d) { return Edge{a, b, d}; }),
           py::arg("a"), py::arg("b"), py::arg("distance"))
      .def_readwrite("a", &Edge::a)
      .def_readwrite("b", &Edge::b)
      .def_readwrite("distance", &Edge::distance)
      .def("__repr__", [](const Edge& e) {
        return "Edge(" + std::to_string(e.a) + ", " + std::to_string(e.b) + ", " +
               std::to_string(e.distance) + ")";
      });

  py::class_<Topology>(m, "Topology")
      .def(py::init<std::vector<Node>, std::vector<Edge>>(), py::arg("nodes"), py::arg("edges"))
      .def_static("from_edges",
                  [](std::size_t n, const std::vector<std::tuple<NodeId, NodeId, double>>& es) {
                    std::vector<Edge> edges;
                    for (const auto& [a, b, d] : es) edges.push_back({a, b, d});
                    return Topology::withNodeCount(n, std::move(edges));
                  },
                  py::arg("n"), py::arg("edges"),
                  "Unlabeled topology from (a, b, distance) triples.")
      .def_property_readonly("node_count", &Topology::nodeCount)
      .def_property_readonly("edge_count", &Topology::edgeCount)
      .def_property_readonly("nodes", &Topology::nodes)
      .def_property_readonly("edges", &Topology::edges)
      .def("is_connected", &Topology::isConnected)
      .def("to_json", &serializeTopology)
      .def_static("from_json", &parseTopology, py::arg("text"), py::arg("strict") = true)
      .def(py::self == py::self)
      .def("__len__", &Topology::nodeCount);

  m.def("generate_tree", [](std::size_t n, std::size_t branching, double lo, double hi,
                            std::uint64_t seed) {
          return generateTree(n, branching, DistanceRule{lo, hi, seed});
        },
        py::arg("n"), py::arg("branching") = 2, py::arg("dist_min") = 1.0,
        py::arg("dist_max") = 1.0, py::arg("seed") = 0);
  m.def("generate_ring", [](std::size_t n, std::size_t chords, double lo, double hi,
                            std::uint64_t seed) {
          return generateRing(n, chords, DistanceRule{lo, hi, seed});
        },
        py::arg("n"), py::arg("chords") = 0, py::arg("dist_min") = 1.0,
        py::arg("dist_max") = 1.0, py::arg("seed") = 0);
  m.def("load_topology", &loadTopology, py::arg("path"), py::arg("strict") = true);
  m.def("save_topology", &saveTopology, py::arg("topology"), py::arg("path"));
  m.def("laplacian", &buildLaplacian);
  m.def("incidence", &buildIncidence);
  m.def("distance_laplacian", &buildDistanceLaplacian);
  m.def("shortest_paths", &allPairsShortestPaths,
        "All-pairs shortest paths; unreachable pairs are inf.");

  // demand
  py::class_<DemandMatrix>(m, "DemandMatrix")
      .def(py::init(&demandFromArray), py::arg("labels"), py::arg("values"))
      .def_property_readonly("labels", &DemandMatrix::labels)
      .def_property_readonly("timesteps", &DemandMatrix::timesteps)
      .def_property_readonly("values", &demandToArray)
      .def("aligned_to", &DemandMatrix::alignedTo)
      .def("to_csv", &serializeDemands);
  m.def("compute_weights", [](const DemandMatrix& d) { return computeWeights(d).values(); });
  m.def("load_demands", &loadDemands, py::arg("path"));
  m.def("synthetic_demand",
        [](const std::vector<std::string>& labels, std::size_t timesteps, double spread,
           std::size_t large, double factor, std::uint64_t seed) {
          return syntheticDemand(labels, {timesteps, spread, large, factor, seed});
        },
        py::arg("labels"), py::arg("timesteps") = 8760, py::arg("peak_spread") = 0.5,
        py::arg("large_consumers") = 0, py::arg("large_factor") = 4.0, py::arg("seed") = 0);

  // qubo
  py::class_<PenaltyConfig>(m, "PenaltyConfig")
      .def(py::init([](double beta, std::vector<double> alpha, std::vector<double> gamma) {
             return PenaltyConfig{beta, std::move(alpha), std::move(gamma)};
           }),
           py::arg("beta") = 1.0, py::arg("alpha") = std::vector<double>{1.0},
           py::arg("gamma") = std::vector<double>{1.0})
      .def_readwrite("beta", &PenaltyConfig::beta)
      .def_readwrite("alpha", &PenaltyConfig::alpha)
      .def_readwrite("gamma", &PenaltyConfig::gamma);

  py::class_<QuboInstance>(m, "QuboInstance")
      .def_property_readonly("num_vars", &QuboInstance::numVars)
      .def_property_readonly("nodes", [](const QuboInstance& q) { return q.varIndex().nodes(); })
      .def_property_readonly("producers",
                             [](const QuboInstance& q) { return q.varIndex().producers(); })
      .def_property_readonly("offset", &QuboInstance::offset)
      .def_property_readonly("linear", &QuboInstance::linear)
      .def_property_readonly("quadratic",
                             [](const QuboInstance& q) {
                               std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                               for (const auto& t : q.quadratic()) out.emplace_back(t.i, t.j, t.value);
                               return out;
                             })
      .def("var", [](const QuboInstance& q, std::size_t node, std::size_t producer) {
             return q.varIndex()(node, producer);
           },
           py::arg("node"), py::arg("producer"))
      .def("energy", [](const QuboInstance& q, const std::vector<std::uint8_t>& bits) {
             return energy(q, bits);
           })
      .def("to_text", &serializeQubo)
      .def(py::self == py::self);

  m.def("build_qubo", [](const Topology& t, const std::vector<double>& w, std::size_t k,
                         const PenaltyConfig& cfg) { return buildQubo(t, w, k, cfg); },
        py::arg("topology"), py::arg("weights"), py::arg("k"), py::arg("penalties"));
  m.def("build_unweighted_qubo", &buildUnweightedQubo, py::arg("topology"), py::arg("k"),
        py::arg("penalties"));
  m.def("default_penalties", [](const Topology& t, const std::vector<double>& w,
                                std::size_t k) { return defaultPenalties(t, w, k); },
        py::arg("topology"), py::arg("weights"), py::arg("k"));
  m.def("export_qubo", &exportQubo, py::arg("qubo"), py::arg("path"));
  m.def("import_qubo", &importQubo, py::arg("path"));

  // solvers
  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("assignment",
                             [](const SolveResult& r) { return r.assignment.producerOf; })
      .def_property_readonly("k", [](const SolveResult& r) { return r.assignment.k; })
      .def_readonly("energy", &SolveResult::energy)
      .def_readonly("solver", &SolveResult::solverName)
      .def_readonly("seed", &SolveResult::seed)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("wall_time_s", &SolveResult::wallTimeSeconds)
      .def("to_json", &solveResultToJson, py::arg("include_timing") = false);

  m.def("solve_exhaustive", &solveExhaustive, py::arg("qubo"),
        py::arg("max_vars") = kDefaultExhaustiveMaxVars);
  m.def("solve_anneal",
        [](const QuboInstance& q, std::size_t sweeps, std::size_t restarts,
           std::optional<double> tInitial, std::optional<double> tFinal,
           const std::string& schedule, std::uint64_t seed) {
          AnnealConfig cfg;
          cfg.sweeps = sweeps;
          cfg.restarts = restarts;
          cfg.tInitial = tInitial;
          cfg.tFinal = tFinal;
          if (schedule == "linear") {
            cfg.schedule = Schedule::Linear;
          } else if (schedule != "geometric") {
            throw InvalidArgument("schedule must be geometric or linear");
          }
          cfg.seed = seed;
          cfg.validate();
          py::gil_scoped_release release;
          return solveAnneal(q, cfg);
        },
        py::arg("qubo"), py::arg("sweeps") = 2000, py::arg("restarts") = 8,
        py::arg("t_initial") = py::none(), py::arg("t_final") = py::none(),
        py::arg("schedule") = "geometric", py::arg("seed") = 0);
  m.def("solve_heuristic",
        [](const Topology& t, const std::vector<double>& w, std::size_t k,
           const PenaltyConfig& pen, std::size_t restarts, std::uint64_t seed) {
          py::gil_scoped_release release;
          return solveHeuristic(t, w, k, pen, {restarts, seed});
        },
        py::arg("topology"), py::arg("weights"), py::arg("k"), py::arg("penalties"),
        py::arg("restarts") = 8, py::arg("seed") = 0);
  m.def("decode_and_repair",
        [](const QuboInstance& q, const std::vector<std::uint8_t>& bits) {
          return decodeAndRepair(q, bits).producerOf;
        });
  m.def("encode", [](const std::vector<std::size_t>& producers, std::size_t k,
                     const QuboInstance& q) { return encode(Assignment(producers, k), q); },
        py::arg("assignment"), py::arg("k"), py::arg("qubo"));

  // fairness
  m.def("producer_loads", [](const std::vector<std::size_t>& producers, std::size_t k,
                             const std::vector<double>& w) {
          return producerLoads(Assignment(producers, k), w);
        },
        py::arg("assignment"), py::arg("k"), py::arg("weights"));
  m.def("jain_index", [](const std::vector<double>& y) { return jainIndex(y); });
  m.def("distance_index", [](const std::vector<std::size_t>& producers, std::size_t k,
                             const Topology& t) {
          return distanceIndex(Assignment(producers, k), t);
        },
        py::arg("assignment"), py::arg("k"), py::arg("topology"));
  m.def("combined_kpi", &combinedKpi, py::arg("jain"), py::arg("distance"),
        py::arg("kpi_alpha") = 0.5);

  // workflow
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("label", &SweepResult::label)
      .def_readonly("max_producers", &SweepResult::maxProducers)
      .def_readonly("kpi_alpha", &SweepResult::kpiAlpha)
      .def_property_readonly("reports",
                             [](const SweepResult& r) {
                               py::list out;
                               for (const auto& rep : r.reports) {
                                 py::dict d;
                                 d["k"] = rep.kpi.k;
                                 d["solver"] = rep.kpi.solverName;
                                 d["jain"] = rep.kpi.jain;
                                 d["distance_index"] = rep.kpi.distanceIndex;
                                 d["kpi"] = rep.kpi.kpi;
                                 d["energy"] = rep.kpi.energy;
                                 d["assignment"] = rep.assignment.producerOf;
                                 out.append(d);
                               }
                               return out;
                             })
      .def_property_readonly("warnings",
                             [](const SweepResult& r) {
                               std::vector<std::tuple<std::size_t, std::string, std::string>> out;
                               for (const auto& w : r.warnings) out.emplace_back(w.k, w.solver, w.message);
                               return out;
                             })
      .def("to_json", &sweepToJson, py::arg("include_timing") = false)
      .def("to_csv", &sweepToCsv)
      .def_static("from_json", &sweepFromJson);

  m.def("run_sweep",
        [](const Topology& t, const DemandMatrix& d, const std::string& configJson) {
          const SweepConfig cfg = sweepConfigFromJson(configJson);
          py::gil_scoped_release release;
          return runSweep(t, d, cfg);
        },
        py::arg("topology"), py::arg("demands"), py::arg("config") = "{}",
        "Sweep k = 1..max_producers. `config` uses the CLI's JSON config format.");
  m.def("run_sweep_weights",
        [](const Topology& t, const std::vector<double>& w, const std::string& configJson) {
          const SweepConfig cfg = sweepConfigFromJson(configJson);
          const WeightVector wv(w);
          py::gil_scoped_release release;
          return runSweep(t, wv, cfg);
        },
        py::arg("topology"), py::arg("weights"), py::arg("config") = "{}");
  m.def("compare_csv", [](const std::vector<SweepResult>& sweeps) {
    return comparisonToCsv(compareTopologies(sweeps));
  });
}
