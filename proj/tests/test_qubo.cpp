#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "dhfair/error.hpp"
#include "dhfair/generators.hpp"
#include "dhfair/io.hpp"
#include "dhfair/qubo.hpp"
#include "support.hpp"

using namespace dhfair;
namespace fs = std::filesystem;
using testing::bitsOf;
using testing::directCost;
using testing::oneHot;

namespace {

// Term-by-term sum straight from the stored coefficients.
double summed(const QuboInstance& q, const std::vector<std::uint8_t>& b) {
  double e = q.offset();
  for (std::size_t v = 0; v < q.numVars(); ++v) {
    if (b[v]) e += q.linear()[v];
  }
  for (const auto& t : q.quadratic()) {
    if (b[t.i] && b[t.j]) e += t.value;
  }
  return e;
}

}  // namespace

TEST_CASE("single node, single producer") {
  const Topology t = Topology::withNodeCount(1, {});
  PenaltyConfig cfg{1.0, {3.0}, {5.0}};
  const auto q = buildQubo(t, std::vector<double>{1.0}, 1, cfg);
  CHECK(q.numVars() == 1);
  CHECK(energy(q, std::vector<std::uint8_t>{1}) == 0.0);
  CHECK(energy(q, std::vector<std::uint8_t>{0}) == 8.0);
  CHECK(q.quadratic().empty());
}

TEST_CASE("single edge matches direct evaluation on all 16 vectors") {
  for (double d : {1.0, 2.5}) {
    const Topology t = Topology::withNodeCount(2, {{0, 1, d}});
    const std::vector<double> w{0.5, 0.5};
    const PenaltyConfig cfg{1.5, {2.0}, {3.0}};
    const auto q = buildQubo(t, w, 2, cfg);
    for (std::uint64_t m = 0; m < 16; ++m) {
      const auto b = bitsOf(m, 4);
      CHECK(energy(q, b) ==
            doctest::Approx(directCost(t, w, 2, 1.5, {2.0}, {3.0}, b)).epsilon(1e-12));
    }
    // Split: no internal edge and exact balance.
    CHECK(energy(q, oneHot({0, 1}, 2)) == doctest::Approx(0.0));
    // Together: 2*beta*d internal plus alpha * 2 * (1/2)^2.
    CHECK(energy(q, oneHot({0, 0}, 2)) == doctest::Approx(2 * 1.5 * d + 1.0));
  }
}

TEST_CASE("ring with random weights and penalties matches direct evaluation") {
  std::mt19937_64 rng(12);
  const Topology t = generateRing(6, 1, DistanceRule::uniform(0.5, 2.0, 1));
  const auto w = testing::randomWeights(6, rng);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  std::vector<double> alpha{pos(rng), pos(rng)};
  std::vector<double> gamma(6);
  for (auto& g : gamma) g = pos(rng);
  const double beta = pos(rng);
  const auto q = buildQubo(t, w, 2, {beta, alpha, gamma});
  for (int s = 0; s < 500; ++s) {
    const auto b = bitsOf(rng(), 12);
    const double want = directCost(t, w, 2, beta, alpha, gamma, b);
    CHECK(testing::relClose(energy(q, b), want, 1e-9));
    CHECK(testing::relClose(summed(q, b), want, 1e-9));
  }
}

TEST_CASE("instances are well formed") {
  for (const auto& c : testing::suite()) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, c.topo.nodeCount()); ++k) {
      const auto q = buildQubo(c.topo, c.weights, k, defaultPenalties(c.topo, c.weights, k));
      CHECK(q.numVars() == c.topo.nodeCount() * k);
      for (std::size_t t = 0; t < q.quadratic().size(); ++t) {
        const auto& term = q.quadratic()[t];
        CHECK(term.i < term.j);
        CHECK(term.value != 0.0);
        if (t > 0) {
          const auto& prev = q.quadratic()[t - 1];
          CHECK((prev.i < term.i || (prev.i == term.i && prev.j < term.j)));
        }
      }
      // The variable index is a bijection.
      std::vector<int> seen(q.numVars(), 0);
      for (std::size_t i = 0; i < c.topo.nodeCount(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const auto v = q.varIndex()(i, j);
          ++seen[v];
          CHECK(q.varIndex().node(v) == i);
          CHECK(q.varIndex().producer(v) == j);
        }
      }
      for (int s : seen) CHECK(s == 1);
    }
  }
}

TEST_CASE("feasible energy splits into distance and balance parts") {
  std::mt19937_64 rng(5);
  for (const auto& c : testing::suite()) {
    const std::size_t n = c.topo.nodeCount();
    const std::size_t k = std::min<std::size_t>(3, n);
    const PenaltyConfig cfg{1.3, {0.7, 2.0, 1.1}, {4.0}};
    PenaltyConfig use = cfg;
    use.alpha.resize(k);
    const auto q = buildQubo(c.topo, c.weights, k, use);
    for (int s = 0; s < 20; ++s) {
      std::vector<std::size_t> p(n);
      for (auto& x : p) x = rng() % k;
      double internal = 0.0;
      for (const auto& e : c.topo.edges()) {
        if (p[e.a] == p[e.b]) internal += e.distance;
      }
      std::vector<double> load(k, 0.0);
      for (std::size_t i = 0; i < n; ++i) load[p[i]] += c.weights[i];
      double balance = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        balance += use.alpha[j] * (load[j] - 1.0 / k) * (load[j] - 1.0 / k);
      }
      CHECK(energy(q, oneHot(p, k)) ==
            doctest::Approx(2 * use.beta * internal + balance).epsilon(1e-12));
    }
  }
}

TEST_CASE("unweighted instance") {
  SUBCASE("K2 splits cost one cut edge seen from both sides") {
    // With alpha = beta the merged state ties with the split, so the
    // balance weight is doubled to make the split the strict optimum.
    const Topology k2 = Topology::withNodeCount(2, {{0, 1, 1.0}});
    const auto q = buildUnweightedQubo(k2, 2, {1.0, {2.0}, {1.0}});
    double best = 1e300;
    std::vector<std::vector<std::size_t>> argmin;
    testing::forEachAssignment(2, 2, [&](const std::vector<std::size_t>& p) {
      const double e = energy(q, oneHot(p, 2));
      if (e < best - 1e-12) {
        best = e;
        argmin = {p};
      } else if (std::abs(e - best) <= 1e-12) {
        argmin.push_back(p);
      }
    });
    CHECK(best == doctest::Approx(2.0));
    CHECK(argmin.size() == 2);
    for (const auto& p : argmin) CHECK(p[0] != p[1]);
  }

  SUBCASE("K3 with unit penalties is flat over feasible states") {
    // cut energy 2 * (3 - internal) and balance sum s^2 - 3 add to 6.
    const Topology k3 = generateRing(3, 0);
    const auto q = buildUnweightedQubo(k3, 3, {1.0, {1.0}, {1.0}});
    testing::forEachAssignment(3, 3, [&](const std::vector<std::size_t>& p) {
      CHECK(energy(q, oneHot(p, 3)) == doctest::Approx(6.0));
    });
    // A heavier balance weight singles out one node per producer.
    const auto q2 = buildUnweightedQubo(k3, 3, {1.0, {2.0}, {10.0}});
    double best = 1e300;
    std::vector<std::size_t> arg;
    testing::forEachAssignment(3, 3, [&](const std::vector<std::size_t>& p) {
      const double e = energy(q2, oneHot(p, 3));
      if (e < best - 1e-12) {
        best = e;
        arg = p;
      }
    });
    CHECK(arg == std::vector<std::size_t>{0, 1, 2});
    CHECK(best == doctest::Approx(6.0));  // three cut edges, each counted twice
  }

  SUBCASE("single producer on a path") {
    const auto q = buildUnweightedQubo(generateTree(4, 1), 1, {1.0, {1.0}, {1.0}});
    CHECK(energy(q, std::vector<std::uint8_t>{1, 1, 1, 1}) == 0.0);
  }
}

TEST_CASE("weighted and unweighted instances differ only in the edge term") {
  // Unit distances, w = 1/n, alpha scaled by n^2: the balance parts agree
  // and the difference is 2 beta (internal - cut) = 2 beta (m - 2 cut).
  for (const auto& c : testing::suite()) {
    bool unit = true;
    for (const auto& e : c.topo.edges()) unit = unit && e.distance == 1.0;
    if (!unit) continue;
    const std::size_t n = c.topo.nodeCount();
    const std::vector<double> w(n, 1.0 / n);
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, n); ++k) {
      const double beta = 0.8, alpha = 1.7;
      const auto qu = buildUnweightedQubo(c.topo, k, {beta, {alpha}, {9.0}});
      const auto qw = buildQubo(c.topo, w, k, {beta, {alpha * n * n}, {9.0}});
      testing::forEachAssignment(n, k, [&](const std::vector<std::size_t>& p) {
        double cut = 0.0;
        for (const auto& e : c.topo.edges()) cut += p[e.a] != p[e.b];
        const auto b = oneHot(p, k);
        const double m = static_cast<double>(c.topo.edgeCount());
        CHECK(energy(qw, b) - energy(qu, b) ==
              doctest::Approx(2 * beta * (m - 2 * cut)).epsilon(1e-9));
      });
    }
  }
}

TEST_CASE("energy edge cases") {
  const auto q = buildQubo(generateTree(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 2,
                           {1.0, {2.0}, {3.0}});
  CHECK(energy(q, std::vector<std::uint8_t>(6, 0)) == q.offset());
  CHECK_THROWS_AS(energy(q, std::vector<std::uint8_t>(5, 0)), InvalidArgument);
  CHECK_THROWS_AS(buildQubo(generateTree(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 4,
                            {}),
                  InvalidArgument);
  CHECK_THROWS_AS(buildQubo(generateTree(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 0,
                            {}),
                  InvalidArgument);
  CHECK_THROWS_AS(buildQubo(generateTree(3, 1), std::vector<double>{0.5, 0.5}, 1, {}),
                  InvalidArgument);
  CHECK_THROWS_AS(buildQubo(generateTree(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 2,
                            {0.0, {1.0}, {1.0}}),
                  InvalidArgument);
  CHECK_THROWS_AS(buildQubo(generateTree(3, 1), std::vector<double>{0.2, 0.3, 0.5}, 2,
                            {1.0, {1.0, 1.0, 1.0}, {1.0}}),
                  InvalidArgument);
}

TEST_CASE("unnormalized weights use their own total") {
  const Topology t = generateTree(2, 1);
  const auto q = buildQubo(t, std::vector<double>{2.0, 2.0}, 2, {1.0, {1.0}, {1.0}});
  CHECK(energy(q, oneHot({0, 1}, 2)) == doctest::Approx(0.0));
}

TEST_CASE("default penalties") {
  const Topology c4 = generateRing(4, 0);
  const std::vector<double> w(4, 0.25);
  const auto p = defaultPenalties(c4, w, 2);
  CHECK(p.beta == 1.0);
  CHECK(p.alpha == std::vector<double>{32.0});
  CHECK(p.gamma == std::vector<double>{20.0});

  const auto single = defaultPenalties(Topology::withNodeCount(1, {}),
                                       std::vector<double>{1.0}, 1);
  CHECK(single.beta > 0);
  CHECK(std::isfinite(single.alphaFor(0)));
  CHECK(single.alphaFor(0) > 0);
  CHECK(std::isfinite(single.gammaFor(0)));
  CHECK(single.gammaFor(0) > 0);
}

TEST_CASE("export and import") {
  const auto dir = fs::temp_directory_path() / "dhfair_qubo_test";
  fs::create_directories(dir);

  SUBCASE("linear only") {
    const auto q = buildQubo(Topology::withNodeCount(1, {}), std::vector<double>{1.0}, 1,
                             {1.0, {2.0}, {3.0}});
    const std::string text = serializeQubo(q);
    std::istringstream in(text);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == 'c') continue;
      ++lines;
      if (lines == 1) CHECK(line.rfind("p qubo 1 1 0 ", 0) == 0);
    }
    CHECK(lines == 2);
    exportQubo(q, dir / "one.qubo");
    CHECK(importQubo(dir / "one.qubo") == q);
  }

  SUBCASE("two nodes two producers") {
    const auto q = buildQubo(generateTree(2, 1), std::vector<double>{0.3, 0.7}, 2,
                             {1.0, {0.1}, {1.0 / 3.0}});
    CHECK(q.numVars() == 4);
    exportQubo(q, dir / "two.qubo");
    CHECK(fs::exists(dir / "two.qubo.map"));
    CHECK(importQubo(dir / "two.qubo") == q);
  }

  SUBCASE("offset survives") {
    const QuboInstance q(VarIndex(1, 2), {0.5, 0.0}, {{0, 1, -1.25}}, 3.25);
    exportQubo(q, dir / "offset.qubo");
    const auto back = importQubo(dir / "offset.qubo");
    CHECK(back.offset() == 3.25);
    CHECK(back == q);
  }

  SUBCASE("malformed lines carry line numbers") {
    const std::string map = serializeVarMap(VarIndex(1, 2));
    CHECK_THROWS_WITH_AS(parseQubo("p qubo 2 1 0 0\n0 0 x\n", map),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(parseQubo("c hi\np qubo 2 1 1 0\n0 0 1\n1 0 2\n", map),
                         doctest::Contains("line 4"), ParseError);
    CHECK_THROWS_AS(parseQubo("p qubo 2 2 0 0\n0 0 0\n0 0 0\n", map), ParseError);
    CHECK_THROWS_AS(parseQubo("p qubo 2 1 0 0\n5 5 1\n", map), ParseError);
    CHECK_THROWS_AS(parseQubo("p qubo 3 0 0 0\n", map), ParseError);
    CHECK_THROWS_AS(parseQubo("p qubo 2 2 0 0\n0 0 1\n", map), ParseError);
    CHECK_THROWS_AS(parseQubo("", map), ParseError);
  }
  fs::remove_all(dir);
}
