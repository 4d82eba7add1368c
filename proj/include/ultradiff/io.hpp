#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ultradiff/multitopo.hpp"
#include "ultradiff/padic.hpp"
#include "ultradiff/toposort.hpp"
#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

using json = nlohmann::ordered_json;

/// Parses a file; throws ParseError on I/O or syntax errors.
json read_json(const std::filesystem::path& path);

/// {"vertices":[..], "topologies":[{"edges":[["a","b"],..]},..], "primes":[..]}.
/// Missing primes default to 2, 3, 5, ...
TopologyFamily family_from_json(const json& j);
json to_json(const TopologyFamily& family);

/**
 * Graph file. The encoded form carries "primes", "w" and "d"; an optional
 * "weights" list (parallel to "edges") overrides the lengths 1/log(w+1).
 * A file with "weights" but no "w" is a plain weighted graph.
 */
struct GraphFile {
  std::vector<std::string> vertices;
  std::vector<UndirectedEdge> edges;  // sorted
  std::vector<std::uint64_t> primes;
  std::optional<WeightedMultiGraph> encoded;
  std::optional<std::vector<double>> weights;  // parallel to edges

  WeightedGraph distance_graph() const;
};

GraphFile graph_from_json(const json& j);
json to_json(const WeightedMultiGraph& graph, const std::vector<std::uint64_t>& primes);

/// Nested {"radius", "children"} records with {"radius": 0, "leaf": label} at the bottom.
json to_json(const Dendrogram& dendrogram);

/// {"p", "m", "rho", "discs": {label: [digits]}}.
json to_json(const DiscAssignment& assign, const std::vector<std::string>& labels);

/// {"vertices":[..] (optional), "edges":[["a","b"],..], "lengths":[..] (optional)}.
Dag dag_from_json(const json& j);

}  // namespace ultradiff
