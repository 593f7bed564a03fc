#include "dhfair/demand.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "dhfair/error.hpp"
#include "dhfair/io.hpp"
#include "dhfair/random.hpp"

namespace dhfair {

namespace {

std::vector<std::string_view> splitCsvLine(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

/// Lines with the trailing newline removed; a UTF-8 BOM is dropped.
std::vector<std::string_view> splitLines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool parseIndex(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

DemandMatrix::DemandMatrix(std::vector<std::string> labels,
                           std::size_t timesteps,
                           std::vector<double> rowMajorValues)
    : labels_(std::move(labels)),
      timesteps_(timesteps),
      values_(std::move(rowMajorValues)) {
  if (labels_.empty()) throw InvalidArgument("demand matrix has no nodes");
  if (timesteps_ == 0) throw InvalidArgument("demand matrix has no timesteps");
  if (values_.size() != timesteps_ * labels_.size()) {
    throw InvalidArgument("demand matrix shape does not match value count");
  }
  for (std::size_t t = 0; t < timesteps_; ++t) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const double v = values_[t * labels_.size() + i];
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidArgument("demand at timestep " + std::to_string(t) +
                              ", node '" + labels_[i] +
                              "' must be finite and nonnegative");
      }
    }
  }
}

DemandMatrix DemandMatrix::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  auto v = values_;
  for (auto& x : v) x *= factor;
  return DemandMatrix(labels_, timesteps_, std::move(v));
}

DemandMatrix DemandMatrix::alignedTo(const Topology& topo) const {
  const std::size_t n = topo.nodeCount();
  if (labels_.size() != n) {
    throw InvalidArgument("demand file has " + std::to_string(labels_.size()) +
                          " columns but topology has " + std::to_string(n) +
                          " nodes");
  }
  std::unordered_map<std::string, std::size_t> byLabel;
  for (std::size_t i = 0; i < n; ++i) byLabel.emplace(topo.displayLabel(i), i);

  // column c of this matrix goes to node perm[c]
  std::vector<std::size_t> perm(n);
  std::vector<bool> used(n, false);
  auto assign = [&](auto lookup) {
    std::fill(used.begin(), used.end(), false);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t node = 0;
      if (!lookup(labels_[c], node) || used[node]) return false;
      used[node] = true;
      perm[c] = node;
    }
    return true;
  };
  const bool byName = assign([&](const std::string& l, std::size_t& out) {
    auto it = byLabel.find(l);
    if (it == byLabel.end()) return false;
    out = it->second;
    return true;
  });
  if (!byName) {
    const bool byIndex = assign([&](const std::string& l, std::size_t& out) {
      return parseIndex(l, out) && out < n;
    });
    if (!byIndex) {
      throw InvalidArgument(
          "demand header does not match topology node labels or indices");
    }
  }
  std::vector<std::string> labels(n);
  std::vector<double> values(values_.size());
  for (std::size_t c = 0; c < n; ++c) {
    labels[perm[c]] = labels_[c];
    for (std::size_t t = 0; t < timesteps_; ++t) {
      values[t * n + perm[c]] = values_[t * n + c];
    }
  }
  return DemandMatrix(std::move(labels), timesteps_, std::move(values));
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw InvalidArgument("weight vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!(w_[i] > 0.0) || !std::isfinite(w_[i])) {
      throw InvalidArgument("weight of node " + std::to_string(i) +
                            " must be positive");
    }
    sum += w_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("weights must sum to 1 (got " + formatDouble(sum) +
                          ")");
  }
}

WeightVector computeWeights(const DemandMatrix& demands) {
  const std::size_t n = demands.nodeCount();
  std::vector<double> peak(n, 0.0);
  for (std::size_t t = 0; t < demands.timesteps(); ++t) {
    auto row = demands.row(t);
    for (std::size_t i = 0; i < n; ++i) peak[i] = std::max(peak[i], row[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (peak[i] <= 0.0) {
      throw InvalidArgument("node '" + demands.labels()[i] +
                            "' has zero demand at every timestep");
    }
  }
  const double total = std::accumulate(peak.begin(), peak.end(), 0.0);
  for (auto& p : peak) p /= total;
  return WeightVector(std::move(peak));
}

DemandMatrix parseDemands(std::string_view text) {
  const auto lines = splitLines(text);
  if (lines.empty()) throw ParseError("demand CSV: missing header row");
  std::vector<std::string> labels;
  for (auto f : splitCsvLine(lines[0])) labels.push_back(trim(f));
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (labels[c].empty()) {
      throw ParseError("demand CSV: empty label in header column " +
                       std::to_string(c + 1));
    }
  }
  const std::size_t n = labels.size();
  std::vector<double> values;
  values.reserve((lines.size() - 1) * n);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = splitCsvLine(lines[r]);
    const std::string where = "demand CSV line " + std::to_string(r + 1);
    if (fields.size() != n) {
      throw ParseError(where + ": expected " + std::to_string(n) +
                       " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < n; ++c) {
      double v = 0.0;
      if (!parseDouble(fields[c], v) || !std::isfinite(v)) {
        throw ParseError(where + ", column " + std::to_string(c + 1) + " (" +
                         labels[c] + "): not a number: '" + trim(fields[c]) +
                         "'");
      }
      if (v < 0.0) {
        throw ParseError(where + ", column " + std::to_string(c + 1) + " (" +
                         labels[c] + "): negative demand " + trim(fields[c]));
      }
      values.push_back(v);
    }
  }
  if (lines.size() < 2) throw ParseError("demand CSV: no data rows");
  return DemandMatrix(std::move(labels), lines.size() - 1, std::move(values));
}

DemandMatrix loadDemands(const std::filesystem::path& path) {
  try {
    return parseDemands(readTextFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serializeDemands(const DemandMatrix& demands) {
  std::string out;
  const auto& labels = demands.labels();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (c) out += ',';
    out += labels[c];
  }
  out += '\n';
  for (std::size_t t = 0; t < demands.timesteps(); ++t) {
    auto row = demands.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += formatDouble(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string serializeWeights(const WeightVector& w,
                             const std::vector<std::string>& labels) {
  std::string out = "node,label,weight\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    out += std::to_string(i) + ',' +
           (i < labels.size() ? labels[i] : std::to_string(i)) + ',' +
           formatDouble(w[i]) + '\n';
  }
  return out;
}

WeightVector parseWeights(std::string_view text) {
  const auto lines = splitLines(text);
  if (lines.empty() || trim(lines[0]) != "node,label,weight") {
    throw ParseError("weights file: expected header 'node,label,weight'");
  }
  std::vector<double> w(lines.size() - 1, 0.0);
  std::vector<bool> seen(w.size(), false);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = splitCsvLine(lines[r]);
    const std::string where = "weights file line " + std::to_string(r + 1);
    std::size_t node = 0;
    double value = 0.0;
    if (fields.size() != 3) throw ParseError(where + ": expected 3 fields");
    if (!parseIndex(trim(fields[0]), node) || node >= w.size() || seen[node]) {
      throw ParseError(where + ": bad or duplicate node index");
    }
    if (!parseDouble(fields[2], value)) {
      throw ParseError(where + ": weight is not a number");
    }
    seen[node] = true;
    w[node] = value;
  }
  return WeightVector(std::move(w));
}

WeightVector loadWeights(const std::filesystem::path& path) {
  try {
    return parseWeights(readTextFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

DemandMatrix syntheticDemand(const std::vector<std::string>& labels,
                             const SyntheticDemandOptions& options) {
  const std::size_t n = labels.size();
  const std::size_t nt = options.timesteps;
  if (n == 0 || nt == 0) {
    throw InvalidArgument("synthetic demand needs nodes and timesteps");
  }
  Rng rng(options.seed);
  std::vector<double> peak(n);
  std::vector<double> phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Box-Muller from two portable uniforms.
    const double u1 = 1.0 - uniformUnit(rng);
    const double u2 = uniformUnit(rng);
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    peak[i] = std::exp(options.peakSpread * z);
    if (i < options.largeConsumers) peak[i] *= options.largeFactor;
    phase[i] = 0.1 * uniformUnit(rng);
  }
  std::vector<double> values(nt * n);
  for (std::size_t t = 0; t < nt; ++t) {
    const double year = static_cast<double>(t) / static_cast<double>(nt);
    for (std::size_t i = 0; i < n; ++i) {
      const double seasonal =
          0.55 + 0.45 * std::cos(2.0 * std::numbers::pi * (year - phase[i]));
      const double noise = 0.9 + 0.1 * uniformUnit(rng);
      values[t * n + i] = peak[i] * seasonal * noise;
    }
  }
  return DemandMatrix(labels, nt, std::move(values));
}

}  // namespace dhfair
