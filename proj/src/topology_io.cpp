#include "dhfair/topology_io.hpp"

#include <algorithm>
#include <initializer_list>
#include <json.hpp>
#include <string>
#include <vector>

#include "dhfair/error.hpp"
#include "dhfair/io.hpp"

namespace dhfair {

namespace {

using nlohmann::json;

std::string lineColumn(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void rejectUnknown(const json& obj, std::initializer_list<const char*> allowed,
                   const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return key == k; });
    if (!known) throw ParseError(where + ": unknown field '" + key + "'");
  }
}

std::size_t requireIndex(const json& obj, const char* key,
                         const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ParseError(where + "." + key + ": expected a nonnegative integer");
  }
  return it->get<std::size_t>();
}

double requireNumber(const json& obj, const char* key,
                     const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  if (!it->is_number()) {
    throw ParseError(where + "." + key + ": expected a number");
  }
  return it->get<double>();
}

std::optional<double> optionalNumber(const json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return requireNumber(obj, key, where);
}

}  // namespace

Topology parseTopology(std::string_view text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("topology: malformed JSON at " +
                     lineColumn(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw ParseError("topology: expected a JSON object");
  if (strict) rejectUnknown(doc, {"name", "nodes", "edges"}, "topology");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("topology: 'nodes' must be an array");
  }
  if (doc.contains("edges") && !doc["edges"].is_array()) {
    throw ParseError("topology: 'edges' must be an array");
  }

  const auto& jnodes = doc["nodes"];
  const std::size_t n = jnodes.size();
  std::vector<Node> nodes(n);
  std::vector<bool> filled(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const auto& jn = jnodes[i];
    if (!jn.is_object()) throw ParseError(where + ": expected an object");
    if (strict) rejectUnknown(jn, {"id", "label", "x", "y"}, where);
    const std::size_t id = requireIndex(jn, "id", where);
    if (id >= n) {
      throw ParseError(where + ".id: " + std::to_string(id) +
                       " is outside 0.." + std::to_string(n - 1));
    }
    if (filled[id]) {
      throw ParseError(where + ".id: duplicate id " + std::to_string(id));
    }
    filled[id] = true;
    Node& node = nodes[id];
    if (jn.contains("label")) {
      if (!jn["label"].is_string()) {
        throw ParseError(where + ".label: expected a string");
      }
      node.label = jn["label"].get<std::string>();
    }
    node.x = optionalNumber(jn, "x", where);
    node.y = optionalNumber(jn, "y", where);
  }

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    const auto& jedges = doc["edges"];
    edges.reserve(jedges.size());
    for (std::size_t i = 0; i < jedges.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const auto& je = jedges[i];
      if (!je.is_object()) throw ParseError(where + ": expected an object");
      if (strict) rejectUnknown(je, {"a", "b", "distance"}, where);
      edges.push_back({requireIndex(je, "a", where),
                       requireIndex(je, "b", where),
                       requireNumber(je, "distance", where)});
    }
  }
  return Topology(std::move(nodes), std::move(edges));
}

std::string serializeTopology(const Topology& topo) {
  json doc;
  json jnodes = json::array();
  for (std::size_t i = 0; i < topo.nodeCount(); ++i) {
    const auto& node = topo.nodes()[i];
    json jn = {{"id", i}};
    if (!node.label.empty()) jn["label"] = node.label;
    if (node.x) jn["x"] = *node.x;
    if (node.y) jn["y"] = *node.y;
    jnodes.push_back(std::move(jn));
  }
  json jedges = json::array();
  for (const auto& e : topo.edges()) {
    jedges.push_back({{"a", e.a}, {"b", e.b}, {"distance", e.distance}});
  }
  doc["nodes"] = std::move(jnodes);
  doc["edges"] = std::move(jedges);
  return doc.dump(2) + "\n";
}

Topology loadTopology(const std::filesystem::path& path, bool strict) {
  const std::string text = readTextFile(path);
  try {
    return parseTopology(text, strict);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void saveTopology(const Topology& topo, const std::filesystem::path& path) {
  writeFileAtomic(path, serializeTopology(topo));
}

}  // namespace dhfair
