#include "dhfair/qubo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

#include "dhfair/error.hpp"
#include "dhfair/io.hpp"

namespace dhfair {

namespace {

/// Dense upper-triangular accumulator used while expanding the cost terms.
class QuboBuilder {
 public:
  explicit QuboBuilder(VarIndex index)
      : index_(index),
        linear_(index.size(), 0.0),
        upper_(index.size() * index.size(), 0.0) {}

  void addLinear(std::size_t v, double value) { linear_[v] += value; }
  void addQuadratic(std::size_t u, std::size_t v, double value) {
    if (u > v) std::swap(u, v);
    upper_[u * index_.size() + v] += value;
  }
  void addOffset(double value) { offset_ += value; }

  QuboInstance finish() && {
    const std::size_t nv = index_.size();
    std::vector<QuadTerm> quad;
    for (std::size_t u = 0; u < nv; ++u) {
      for (std::size_t v = u + 1; v < nv; ++v) {
        const double value = upper_[u * nv + v];
        if (value != 0.0) quad.push_back({u, v, value});
      }
    }
    return QuboInstance(index_, std::move(linear_), std::move(quad), offset_);
  }

 private:
  VarIndex index_;
  std::vector<double> linear_;
  std::vector<double> upper_;
  double offset_ = 0.0;
};

void checkProducerCount(std::size_t n, std::size_t k) {
  if (k == 0) throw InvalidArgument("number of producers must be >= 1");
  if (k > n) {
    throw InvalidArgument("number of producers (" + std::to_string(k) +
                          ") exceeds number of nodes (" + std::to_string(n) +
                          ")");
  }
}

/// sum_i gamma_i (sum_j x_ij - 1)^2, using x^2 = x.
void addOneHotPenalty(QuboBuilder& b, const VarIndex& idx,
                      const PenaltyConfig& cfg) {
  for (std::size_t i = 0; i < idx.nodes(); ++i) {
    const double g = cfg.gammaFor(i);
    for (std::size_t j = 0; j < idx.producers(); ++j) {
      b.addLinear(idx(i, j), -g);
      for (std::size_t j2 = j + 1; j2 < idx.producers(); ++j2) {
        b.addQuadratic(idx(i, j), idx(i, j2), 2.0 * g);
      }
    }
    b.addOffset(g);
  }
}

/// sum_j alpha_j (sum_i w_i x_ij - target)^2.
void addBalancePenalty(QuboBuilder& b, const VarIndex& idx,
                       std::span<const double> w, double target,
                       const PenaltyConfig& cfg) {
  for (std::size_t j = 0; j < idx.producers(); ++j) {
    const double a = cfg.alphaFor(j);
    for (std::size_t i = 0; i < idx.nodes(); ++i) {
      b.addLinear(idx(i, j), a * (w[i] * w[i] - 2.0 * target * w[i]));
      for (std::size_t i2 = i + 1; i2 < idx.nodes(); ++i2) {
        b.addQuadratic(idx(i, j), idx(i2, j), 2.0 * a * w[i] * w[i2]);
      }
    }
    b.addOffset(a * target * target);
  }
}

QuboBuilder newBuilder(std::size_t n, std::size_t k) {
  return QuboBuilder(VarIndex(n, k));
}

}  // namespace

void PenaltyConfig::validate(std::size_t nodes, std::size_t producers) const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(beta)) throw InvalidArgument("penalty beta must be positive");
  if (alpha.size() != 1 && alpha.size() != producers) {
    throw InvalidArgument("penalty alpha needs 1 or " +
                          std::to_string(producers) + " entries");
  }
  if (gamma.size() != 1 && gamma.size() != nodes) {
    throw InvalidArgument("penalty gamma needs 1 or " + std::to_string(nodes) +
                          " entries");
  }
  if (!std::all_of(alpha.begin(), alpha.end(), positive)) {
    throw InvalidArgument("penalty alpha entries must be positive");
  }
  if (!std::all_of(gamma.begin(), gamma.end(), positive)) {
    throw InvalidArgument("penalty gamma entries must be positive");
  }
}

QuboInstance::QuboInstance(VarIndex index, std::vector<double> linear,
                           std::vector<QuadTerm> quadratic, double offset)
    : index_(index),
      linear_(std::move(linear)),
      quadratic_(std::move(quadratic)),
      offset_(offset) {
  if (linear_.size() != index_.size()) {
    throw InvalidArgument("linear term count does not match variable count");
  }
  for (std::size_t t = 0; t < quadratic_.size(); ++t) {
    const auto& q = quadratic_[t];
    if (q.i >= q.j || q.j >= index_.size()) {
      throw InvalidArgument("quadratic term (" + std::to_string(q.i) + ", " +
                            std::to_string(q.j) +
                            ") is not strictly upper triangular in range");
    }
    if (q.value == 0.0) {
      throw InvalidArgument("quadratic term stored with zero value");
    }
    if (t > 0) {
      const auto& p = quadratic_[t - 1];
      if (std::tie(p.i, p.j) >= std::tie(q.i, q.j)) {
        throw InvalidArgument("quadratic terms must be sorted and unique");
      }
    }
  }
}

std::size_t QuboInstance::numNonzeroLinear() const {
  return static_cast<std::size_t>(
      std::count_if(linear_.begin(), linear_.end(),
                    [](double v) { return v != 0.0; }));
}

QuboInstance buildQubo(const Topology& topo, std::span<const double> weights,
                       std::size_t k, const PenaltyConfig& cfg) {
  const std::size_t n = topo.nodeCount();
  checkProducerCount(n, k);
  if (weights.size() != n) {
    throw InvalidArgument("weight vector length " +
                          std::to_string(weights.size()) +
                          " does not match node count " + std::to_string(n));
  }
  cfg.validate(n, k);
  auto b = newBuilder(n, k);
  const VarIndex idx(n, k);

  // x_j^T DL x_j = 2 * sum over edges inside producer j of the distance.
  for (const auto& e : topo.edges()) {
    for (std::size_t j = 0; j < k; ++j) {
      b.addQuadratic(idx(e.a, j), idx(e.b, j), 2.0 * cfg.beta * e.distance);
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  addBalancePenalty(b, idx, weights, total / static_cast<double>(k), cfg);
  addOneHotPenalty(b, idx, cfg);
  return std::move(b).finish();
}

QuboInstance buildUnweightedQubo(const Topology& topo, std::size_t k,
                                 const PenaltyConfig& cfg) {
  const std::size_t n = topo.nodeCount();
  checkProducerCount(n, k);
  cfg.validate(n, k);
  auto b = newBuilder(n, k);
  const VarIndex idx(n, k);

  // x_j^T L x_j = sum_i deg_i x_ij - 2 * sum_edges x_aj x_bj.
  for (const auto& e : topo.edges()) {
    for (std::size_t j = 0; j < k; ++j) {
      b.addLinear(idx(e.a, j), cfg.beta);
      b.addLinear(idx(e.b, j), cfg.beta);
      b.addQuadratic(idx(e.a, j), idx(e.b, j), -2.0 * cfg.beta);
    }
  }
  const std::vector<double> unit(n, 1.0);
  addBalancePenalty(b, idx, unit,
                    static_cast<double>(n) / static_cast<double>(k), cfg);
  addOneHotPenalty(b, idx, cfg);
  return std::move(b).finish();
}

double energy(const QuboInstance& q, std::span<const std::uint8_t> bits) {
  if (bits.size() != q.numVars()) {
    throw InvalidArgument("bit vector has length " +
                          std::to_string(bits.size()) + ", expected " +
                          std::to_string(q.numVars()));
  }
  double e = q.offset();
  for (std::size_t v = 0; v < bits.size(); ++v) {
    if (bits[v]) e += q.linear()[v];
  }
  for (const auto& t : q.quadratic()) {
    if (bits[t.i] && bits[t.j]) e += t.value;
  }
  return e;
}

PenaltyConfig defaultPenalties(const Topology& topo,
                               std::span<const double> weights,
                               std::size_t k) {
  const std::size_t n = topo.nodeCount();
  checkProducerCount(n, k);
  if (weights.size() != n) {
    throw InvalidArgument("weight vector length does not match node count");
  }
  std::vector<double> rowSum(n, 0.0);
  for (const auto& e : topo.edges()) {
    rowSum[e.a] += e.distance;
    rowSum[e.b] += e.distance;
  }
  double reach = *std::max_element(rowSum.begin(), rowSum.end());
  if (reach <= 0.0) reach = 1.0;
  const auto [wmin, wmax] = std::minmax_element(weights.begin(), weights.end());
  if (!(*wmin > 0.0)) {
    throw InvalidArgument("default penalties need positive weights");
  }
  PenaltyConfig cfg;
  cfg.beta = 1.0;
  const double alpha = cfg.beta * reach / (*wmin * *wmin);
  cfg.alpha = {alpha};
  cfg.gamma = {2.0 * (cfg.beta * reach + alpha * *wmax)};
  return cfg;
}

std::string serializeQubo(const QuboInstance& q) {
  std::string out = "p qubo " + std::to_string(q.numVars()) + ' ' +
                    std::to_string(q.numNonzeroLinear()) + ' ' +
                    std::to_string(q.quadratic().size()) + ' ' +
                    formatDouble(q.offset()) + '\n';
  for (std::size_t v = 0; v < q.numVars(); ++v) {
    if (q.linear()[v] == 0.0) continue;
    const auto s = std::to_string(v);
    out += s + ' ' + s + ' ' + formatDouble(q.linear()[v]) + '\n';
  }
  for (const auto& t : q.quadratic()) {
    out += std::to_string(t.i) + ' ' + std::to_string(t.j) + ' ' +
           formatDouble(t.value) + '\n';
  }
  return out;
}

std::string serializeVarMap(const VarIndex& index) {
  std::string out = "variable,node,producer\n";
  for (std::size_t v = 0; v < index.size(); ++v) {
    out += std::to_string(v) + ',' + std::to_string(index.node(v)) + ',' +
           std::to_string(index.producer(v)) + '\n';
  }
  return out;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool toIndex(const std::string& s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

VarIndex parseVarMap(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineNo == 1) {
      if (line != "variable,node,producer") {
        throw ParseError("variable map line 1: expected header "
                         "'variable,node,producer'");
      }
      continue;
    }
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    auto f = tokens(line);
    std::size_t v = 0, node = 0, prod = 0;
    if (f.size() != 3 || !toIndex(f[0], v) || !toIndex(f[1], node) ||
        !toIndex(f[2], prod) || v != rows.size()) {
      throw ParseError("variable map line " + std::to_string(lineNo) +
                       ": malformed row");
    }
    rows.emplace_back(node, prod);
  }
  if (rows.empty()) throw ParseError("variable map is empty");
  std::size_t n = 0, k = 0;
  for (auto [node, prod] : rows) {
    n = std::max(n, node + 1);
    k = std::max(k, prod + 1);
  }
  VarIndex idx(n, k);
  if (idx.size() != rows.size()) {
    throw ParseError("variable map does not cover every (node, producer)");
  }
  for (std::size_t v = 0; v < rows.size(); ++v) {
    if (idx(rows[v].first, rows[v].second) != v) {
      throw ParseError("variable map row " + std::to_string(v) +
                       " is not in producer-major layout");
    }
  }
  return idx;
}

}  // namespace

QuboInstance parseQubo(std::string_view quboText, std::string_view mapText) {
  const VarIndex idx = parseVarMap(mapText);
  std::istringstream in{std::string(quboText)};
  std::string line;
  std::size_t lineNo = 0;
  bool haveHeader = false;
  std::size_t numVars = 0, numLinear = 0, numQuad = 0;
  double offset = 0.0;
  std::vector<double> linear;
  std::vector<bool> haveLinear;
  std::vector<QuadTerm> quad;
  std::size_t seenLinear = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError("QUBO line " + std::to_string(lineNo) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    auto f = tokens(line);
    if (f.empty() || f[0][0] == 'c') continue;
    if (!haveHeader) {
      if (f.size() != 6 || f[0] != "p" || f[1] != "qubo" ||
          !toIndex(f[2], numVars) || !toIndex(f[3], numLinear) ||
          !toIndex(f[4], numQuad) || !parseDouble(f[5], offset)) {
        fail("expected 'p qubo <vars> <linear> <quad> <offset>'");
      }
      if (numVars != idx.size()) {
        fail("variable count disagrees with the variable map");
      }
      linear.assign(numVars, 0.0);
      haveLinear.assign(numVars, false);
      haveHeader = true;
      continue;
    }
    std::size_t a = 0, b = 0;
    double value = 0.0;
    if (f.size() != 3 || !toIndex(f[0], a) || !toIndex(f[1], b) ||
        !parseDouble(f[2], value)) {
      fail("expected '<i> <j> <value>'");
    }
    if (a >= numVars || b >= numVars) fail("variable index out of range");
    if (a == b) {
      if (haveLinear[a]) fail("duplicate linear term");
      haveLinear[a] = true;
      linear[a] = value;
      ++seenLinear;
    } else {
      if (a > b) fail("quadratic term must have i < j");
      if (!quad.empty() &&
          std::tie(quad.back().i, quad.back().j) >= std::tie(a, b)) {
        fail("quadratic terms must be sorted and unique");
      }
      if (value == 0.0) fail("zero-valued quadratic term");
      quad.push_back({a, b, value});
    }
  }
  if (!haveHeader) throw ParseError("QUBO file has no header line");
  if (seenLinear != numLinear || quad.size() != numQuad) {
    throw ParseError("QUBO term counts do not match the header");
  }
  return QuboInstance(idx, std::move(linear), std::move(quad), offset);
}

std::filesystem::path varMapPath(const std::filesystem::path& quboPath) {
  auto p = quboPath;
  p += ".map";
  return p;
}

void exportQubo(const QuboInstance& q, const std::filesystem::path& path) {
  writeFileAtomic(varMapPath(path), serializeVarMap(q.varIndex()));
  writeFileAtomic(path, serializeQubo(q));
}

QuboInstance importQubo(const std::filesystem::path& path) {
  try {
    return parseQubo(readTextFile(path), readTextFile(varMapPath(path)));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace dhfair
