#include "dhfair/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dhfair/error.hpp"
#include "dhfair/random.hpp"

namespace dhfair {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Symmetric CSR view of the quadratic terms.
struct Neighbors {
  std::vector<std::size_t> start;
  std::vector<std::size_t> var;
  std::vector<double> coef;

  explicit Neighbors(const QuboInstance& q) {
    const std::size_t nv = q.numVars();
    std::vector<std::size_t> degree(nv, 0);
    for (const auto& t : q.quadratic()) {
      ++degree[t.i];
      ++degree[t.j];
    }
    start.assign(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) start[v + 1] = start[v] + degree[v];
    var.resize(start[nv]);
    coef.resize(start[nv]);
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto& t : q.quadratic()) {
      var[fill[t.i]] = t.j;
      coef[fill[t.i]++] = t.value;
      var[fill[t.j]] = t.i;
      coef[fill[t.j]++] = t.value;
    }
  }
};

/// Dense symmetric coupling matrix for fast one-hot energy evaluation.
class OneHotEvaluator {
 public:
  explicit OneHotEvaluator(const QuboInstance& q)
      : q_(q), nv_(q.numVars()), dense_(nv_ * nv_, 0.0) {
    for (const auto& t : q.quadratic()) {
      dense_[t.i * nv_ + t.j] = t.value;
      dense_[t.j * nv_ + t.i] = t.value;
    }
  }

  double energy(const std::vector<std::size_t>& producerOf) const {
    const auto& idx = q_.varIndex();
    const std::size_t n = producerOf.size();
    double e = q_.offset();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t vi = idx(i, producerOf[i]);
      e += q_.linear()[vi];
      const double* row = &dense_[vi * nv_];
      for (std::size_t u = i + 1; u < n; ++u) {
        e += row[idx(u, producerOf[u])];
      }
    }
    return e;
  }

 private:
  const QuboInstance& q_;
  std::size_t nv_;
  std::vector<double> dense_;
};

bool clearlyLess(double a, double b) {
  return a < b - 1e-12 * std::max(1.0, std::abs(b));
}

}  // namespace

Assignment::Assignment(std::vector<std::size_t> producers, std::size_t k_)
    : producerOf(std::move(producers)), k(k_) {
  if (k == 0) throw InvalidArgument("assignment needs k >= 1");
  for (std::size_t i = 0; i < producerOf.size(); ++i) {
    if (producerOf[i] >= k) {
      throw InvalidArgument("node " + std::to_string(i) + " has producer " +
                            std::to_string(producerOf[i]) + " >= k");
    }
  }
}

Assignment canonicalize(const Assignment& a) {
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> relabel(a.k, kUnset);
  std::size_t next = 0;
  for (auto p : a.producerOf) {
    if (relabel[p] == kUnset) relabel[p] = next++;
  }
  for (auto& r : relabel) {
    if (r == kUnset) r = next++;
  }
  std::vector<std::size_t> out(a.producerOf.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = relabel[a.producerOf[i]];
  return Assignment(std::move(out), a.k);
}

void AnnealConfig::validate() const {
  if (sweeps < 1) throw InvalidArgument("anneal sweeps must be >= 1");
  if (restarts < 1) throw InvalidArgument("anneal restarts must be >= 1");
  if (tInitial.has_value() != tFinal.has_value()) {
    throw InvalidArgument("set both anneal temperatures or neither");
  }
  if (tInitial && !(*tInitial > *tFinal && *tFinal > 0.0)) {
    throw InvalidArgument("anneal temperatures need tInitial > tFinal > 0");
  }
}

std::pair<double, double> annealTemperatures(const QuboInstance& q) {
  const std::size_t nv = q.numVars();
  std::vector<double> reach(nv, 0.0);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < nv; ++v) {
    const double a = std::abs(q.linear()[v]);
    reach[v] += a;
    if (a > 0.0) smallest = std::min(smallest, a);
  }
  for (const auto& t : q.quadratic()) {
    const double a = std::abs(t.value);
    reach[t.i] += a;
    reach[t.j] += a;
    smallest = std::min(smallest, a);
  }
  double largest = nv ? *std::max_element(reach.begin(), reach.end()) : 0.0;
  if (!(largest > 0.0)) return {1.0, 0.01};
  const double hot = largest / std::log(2.0);
  const double cold = smallest / std::log(100.0);
  return {hot, std::min(cold, hot * 1e-3)};
}

BitVector encode(const Assignment& a, const QuboInstance& q) {
  const auto& idx = q.varIndex();
  if (a.nodeCount() != idx.nodes() || a.k != idx.producers()) {
    throw InvalidArgument("assignment shape (" + std::to_string(a.nodeCount()) +
                          " nodes, k=" + std::to_string(a.k) +
                          ") does not match the QUBO layout");
  }
  BitVector bits(q.numVars(), 0);
  for (std::size_t i = 0; i < a.nodeCount(); ++i) {
    bits[idx(i, a.producerOf[i])] = 1;
  }
  return bits;
}

std::size_t oneHotViolations(const QuboInstance& q,
                             std::span<const std::uint8_t> bits) {
  const auto& idx = q.varIndex();
  std::size_t bad = 0;
  for (std::size_t i = 0; i < idx.nodes(); ++i) {
    std::size_t set = 0;
    for (std::size_t j = 0; j < idx.producers(); ++j) set += bits[idx(i, j)] != 0;
    bad += set != 1;
  }
  return bad;
}

namespace {

Assignment repairWith(const QuboInstance& q, const Neighbors& nb,
                      BitVector bits) {
  const auto& idx = q.varIndex();
  const std::size_t n = idx.nodes();
  const std::size_t k = idx.producers();
  std::vector<std::size_t> producerOf(n, 0);
  std::vector<std::size_t> setBits;
  for (std::size_t i = 0; i < n; ++i) {
    setBits.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (bits[idx(i, j)]) setBits.push_back(j);
    }
    if (setBits.size() == 1) {
      producerOf[i] = setBits[0];
      continue;
    }
    // Energy with node i holding only producer j, minus terms independent
    // of node i: linear_j plus couplings to set bits of other nodes.
    auto field = [&](std::size_t j) {
      const std::size_t v = idx(i, j);
      double f = q.linear()[v];
      for (std::size_t p = nb.start[v]; p < nb.start[v + 1]; ++p) {
        const std::size_t u = nb.var[p];
        if (idx.node(u) != i && bits[u]) f += nb.coef[p];
      }
      return f;
    };
    std::vector<std::size_t> candidates;
    if (setBits.empty()) {
      candidates.resize(k);
      std::iota(candidates.begin(), candidates.end(), 0);
    } else {
      candidates = setBits;
    }
    std::size_t best = candidates[0];
    double bestField = field(best);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double f = field(candidates[c]);
      if (f < bestField) {
        bestField = f;
        best = candidates[c];
      }
    }
    for (std::size_t j = 0; j < k; ++j) bits[idx(i, j)] = (j == best);
    producerOf[i] = best;
  }
  return Assignment(std::move(producerOf), k);
}

}  // namespace

Assignment decodeAndRepair(const QuboInstance& q,
                           std::span<const std::uint8_t> bits) {
  if (bits.size() != q.numVars()) {
    throw InvalidArgument("bit vector has length " +
                          std::to_string(bits.size()) + ", expected " +
                          std::to_string(q.numVars()));
  }
  const Neighbors nb(q);
  return repairWith(q, nb, BitVector(bits.begin(), bits.end()));
}

SolveResult solveExhaustive(const QuboInstance& q, std::size_t maxVars) {
  const auto start = Clock::now();
  const auto& idx = q.varIndex();
  if (q.numVars() > maxVars) {
    throw CapacityExceeded("exhaustive solver limited to " +
                           std::to_string(maxVars) + " variables, instance has " +
                           std::to_string(q.numVars()));
  }
  const std::size_t n = idx.nodes();
  const std::size_t k = idx.producers();
  const OneHotEvaluator eval(q);

  std::vector<std::size_t> current(n, 0);
  std::vector<std::size_t> best = current;
  double bestEnergy = eval.energy(current);
  std::size_t visited = 1;
  // Odometer in lexicographic order, last node fastest.
  while (true) {
    std::size_t pos = n;
    while (pos > 0 && current[pos - 1] + 1 == k) {
      current[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
    ++current[pos - 1];
    ++visited;
    const double e = eval.energy(current);
    if (clearlyLess(e, bestEnergy)) {
      bestEnergy = e;
      best = current;
    }
  }
  SolveResult r;
  r.assignment = Assignment(std::move(best), k);
  r.energy = bestEnergy;
  r.solverName = "exhaustive";
  r.iterations = visited;
  r.wallTimeSeconds = secondsSince(start);
  return r;
}

SolveResult solveAnneal(const QuboInstance& q, const AnnealConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t nv = q.numVars();
  const Neighbors nb(q);
  auto [tHot, tCold] = annealTemperatures(q);
  if (cfg.tInitial) {
    tHot = *cfg.tInitial;
    tCold = *cfg.tFinal;
  }
  std::vector<double> temps(cfg.sweeps);
  for (std::size_t s = 0; s < cfg.sweeps; ++s) {
    const double frac = cfg.sweeps == 1 ? 1.0
                                        : static_cast<double>(s) /
                                              static_cast<double>(cfg.sweeps - 1);
    temps[s] = cfg.schedule == Schedule::Geometric
                   ? tHot * std::pow(tCold / tHot, frac)
                   : tHot + (tCold - tHot) * frac;
  }

  Rng rng(cfg.seed);
  std::optional<Assignment> best;
  double bestEnergy = std::numeric_limits<double>::infinity();
  BitVector bits(nv);
  std::vector<double> field(nv);

  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
    // field[v] = linear_v + sum_u Q_vu b_u; flipping v changes the energy
    // by (1 - 2 b_v) * field[v].
    double e = q.offset();
    for (std::size_t v = 0; v < nv; ++v) {
      field[v] = q.linear()[v];
      for (std::size_t p = nb.start[v]; p < nb.start[v + 1]; ++p) {
        if (bits[nb.var[p]]) field[v] += nb.coef[p];
      }
      if (bits[v]) e += q.linear()[v];
    }
    for (const auto& t : q.quadratic()) {
      if (bits[t.i] && bits[t.j]) e += t.value;
    }
    BitVector lowest = bits;
    double lowestEnergy = e;

    for (double temp : temps) {
      for (std::size_t v = 0; v < nv; ++v) {
        const double delta = bits[v] ? -field[v] : field[v];
        if (delta > 0.0 && uniformUnit(rng) >= std::exp(-delta / temp)) {
          continue;
        }
        const double sign = bits[v] ? -1.0 : 1.0;
        bits[v] ^= 1U;
        e += delta;
        for (std::size_t p = nb.start[v]; p < nb.start[v + 1]; ++p) {
          field[nb.var[p]] += sign * nb.coef[p];
        }
      }
      if (e < lowestEnergy) {
        lowestEnergy = e;
        lowest = bits;
      }
    }

    for (const BitVector* candidate : {&bits, &lowest}) {
      Assignment a = repairWith(q, nb, *candidate);
      const double ae = energy(q, encode(a, q));
      if (!best || clearlyLess(ae, bestEnergy)) {
        bestEnergy = ae;
        best = std::move(a);
      }
    }
  }

  SolveResult result;
  result.assignment = std::move(*best);
  result.energy = bestEnergy;
  result.solverName = "anneal";
  result.seed = cfg.seed;
  result.iterations = cfg.sweeps * cfg.restarts * nv;
  result.wallTimeSeconds = secondsSince(start);
  return result;
}

namespace {

/// Feasible-space view of the cost function for the local search.
class PartitionState {
 public:
  PartitionState(const Topology& topo, std::span<const double> w,
                 std::size_t k, const PenaltyConfig& pen)
      : adj_(topo.adjacency()),
        w_(w.begin(), w.end()),
        k_(k),
        beta_(pen.beta),
        alpha_(k),
        producerOf_(topo.nodeCount(), 0),
        load_(k, 0.0),
        conn_(topo.nodeCount() * k, 0.0) {
    for (std::size_t j = 0; j < k; ++j) alpha_[j] = pen.alphaFor(j);
    const double total = std::accumulate(w_.begin(), w_.end(), 0.0);
    target_ = total / static_cast<double>(k);
  }

  std::size_t nodes() const { return w_.size(); }
  std::size_t producer(std::size_t i) const { return producerOf_[i]; }
  const std::vector<std::size_t>& producers() const { return producerOf_; }

  void reset(const std::vector<std::size_t>& producerOf) {
    producerOf_ = producerOf;
    std::fill(load_.begin(), load_.end(), 0.0);
    std::fill(conn_.begin(), conn_.end(), 0.0);
    for (std::size_t i = 0; i < nodes(); ++i) {
      load_[producerOf_[i]] += w_[i];
      for (auto [u, d] : adj_[i]) conn_[i * k_ + producerOf_[u]] += d;
    }
  }

  /// alpha_j ((L + dw - T)^2 - (L - T)^2)
  double balanceDelta(std::size_t j, double dw) const {
    const double s = load_[j] - target_;
    return alpha_[j] * (dw * (2.0 * s + dw));
  }

  double relocateDelta(std::size_t i, std::size_t to) const {
    const std::size_t from = producerOf_[i];
    if (from == to) return 0.0;
    return 2.0 * beta_ * (conn_[i * k_ + to] - conn_[i * k_ + from]) +
           balanceDelta(to, w_[i]) + balanceDelta(from, -w_[i]);
  }

  double swapDelta(std::size_t i, std::size_t u, double dIU) const {
    const std::size_t p = producerOf_[i];
    const std::size_t q = producerOf_[u];
    if (p == q) return 0.0;
    const double dist = (conn_[i * k_ + q] - dIU - conn_[i * k_ + p]) +
                        (conn_[u * k_ + p] - dIU - conn_[u * k_ + q]);
    const double dw = w_[u] - w_[i];
    return 2.0 * beta_ * dist + balanceDelta(p, dw) + balanceDelta(q, -dw);
  }

  void relocate(std::size_t i, std::size_t to) {
    const std::size_t from = producerOf_[i];
    load_[from] -= w_[i];
    load_[to] += w_[i];
    for (auto [u, d] : adj_[i]) {
      conn_[u * k_ + from] -= d;
      conn_[u * k_ + to] += d;
    }
    producerOf_[i] = to;
  }

  /// Cost of the current assignment. The one-hot term is zero on feasible
  /// states, so this equals the QUBO energy.
  double cost() const {
    double internal = 0.0;
    for (std::size_t i = 0; i < nodes(); ++i) {
      for (auto [u, d] : adj_[i]) {
        if (u > i && producerOf_[u] == producerOf_[i]) internal += d;
      }
    }
    double e = 2.0 * beta_ * internal;
    for (std::size_t j = 0; j < k_; ++j) {
      const double s = load_[j] - target_;
      e += alpha_[j] * s * s;
    }
    return e;
  }

  /// Greedy seeding: heaviest node first, each to its cheapest producer.
  std::vector<std::size_t> greedySeed() {
    std::vector<std::size_t> order(nodes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w_[a] > w_[b]; });
    std::vector<std::size_t> assigned(nodes(), k_);
    std::vector<double> load(k_, 0.0);
    for (std::size_t i : order) {
      std::size_t best = 0;
      double bestCost = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k_; ++j) {
        double internal = 0.0;
        for (auto [u, d] : adj_[i]) {
          if (assigned[u] == j) internal += d;
        }
        const double s = load[j] - target_;
        const double c = 2.0 * beta_ * internal +
                         alpha_[j] * (w_[i] * (2.0 * s + w_[i]));
        if (c < bestCost) {
          bestCost = c;
          best = j;
        }
      }
      assigned[i] = best;
      load[best] += w_[i];
    }
    return assigned;
  }

  /// Best-improvement descent over relocations and swaps.
  std::size_t descend() {
    std::size_t moves = 0;
    const double eps = 1e-12 * std::max(1.0, std::abs(cost()));
    std::vector<double> edgeDist(nodes() * nodes(), 0.0);
    for (std::size_t i = 0; i < nodes(); ++i) {
      for (auto [u, d] : adj_[i]) edgeDist[i * nodes() + u] = d;
    }
    while (true) {
      double bestDelta = -eps;
      std::size_t bi = 0, bj = 0;
      bool isSwap = false;
      bool found = false;
      for (std::size_t i = 0; i < nodes(); ++i) {
        for (std::size_t j = 0; j < k_; ++j) {
          const double d = relocateDelta(i, j);
          if (d < bestDelta) {
            bestDelta = d;
            bi = i;
            bj = j;
            isSwap = false;
            found = true;
          }
        }
        for (std::size_t u = i + 1; u < nodes(); ++u) {
          if (producerOf_[u] == producerOf_[i]) continue;
          const double d = swapDelta(i, u, edgeDist[i * nodes() + u]);
          if (d < bestDelta) {
            bestDelta = d;
            bi = i;
            bj = u;
            isSwap = true;
            found = true;
          }
        }
      }
      if (!found) return moves;
      if (isSwap) {
        const std::size_t p = producerOf_[bi];
        const std::size_t q = producerOf_[bj];
        relocate(bi, q);
        relocate(bj, p);
      } else {
        relocate(bi, bj);
      }
      ++moves;
    }
  }

 private:
  std::vector<std::vector<std::pair<NodeId, double>>> adj_;
  std::vector<double> w_;
  std::size_t k_;
  double beta_;
  std::vector<double> alpha_;
  double target_ = 0.0;
  std::vector<std::size_t> producerOf_;
  std::vector<double> load_;
  std::vector<double> conn_;  // conn_[i*k + j]: distance from i into producer j
};

}  // namespace

SolveResult solveHeuristic(const Topology& topo,
                           std::span<const double> weights, std::size_t k,
                           const PenaltyConfig& penalties,
                           const HeuristicConfig& cfg) {
  const auto start = Clock::now();
  const std::size_t n = topo.nodeCount();
  if (k == 0 || k > n) {
    throw InvalidArgument("heuristic needs 1 <= k <= n");
  }
  if (weights.size() != n) {
    throw InvalidArgument("weight vector length does not match node count");
  }
  penalties.validate(n, k);
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);

  PartitionState state(topo, weights, k, penalties);
  Rng rng(cfg.seed);
  std::vector<std::size_t> best;
  double bestCost = std::numeric_limits<double>::infinity();
  std::size_t moves = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<std::size_t> init;
    if (r == 0) {
      init = state.greedySeed();
    } else {
      init.resize(n);
      for (auto& p : init) p = static_cast<std::size_t>(uniformIndex(rng, k));
    }
    state.reset(init);
    moves += state.descend();
    // Recompute loads from scratch so accumulated drift cannot bias the
    // comparison between restarts.
    state.reset(state.producers());
    const double c = state.cost();
    if (best.empty() || clearlyLess(c, bestCost)) {
      bestCost = c;
      best = state.producers();
    }
  }

  SolveResult result;
  result.assignment = Assignment(std::move(best), k);
  result.energy = bestCost;
  result.solverName = "heuristic";
  result.seed = cfg.seed;
  result.iterations = moves;
  result.wallTimeSeconds = secondsSince(start);
  return result;
}

}  // namespace dhfair
