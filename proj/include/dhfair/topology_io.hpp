#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dhfair/topology.hpp"

namespace dhfair {

/// Topology document:
///
///   {
///     "nodes": [ {"id": 0, "label": "A", "x": 0.0, "y": 0.0}, ... ],
///     "edges": [ {"a": 0, "b": 1, "distance": 120.5}, ... ]
///   }
///
/// `id` is required and the ids must be exactly 0..n-1 (any order).
/// `label`, `x`, `y` are optional. A top-level `name` string is allowed.
/// With `strict`, any other key is rejected.
Topology parseTopology(std::string_view text, bool strict = true);
std::string serializeTopology(const Topology& topo);

Topology loadTopology(const std::filesystem::path& path, bool strict = true);
void saveTopology(const Topology& topo, const std::filesystem::path& path);

}  // namespace dhfair
