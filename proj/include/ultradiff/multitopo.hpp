#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ultradiff {

using LabeledEdge = std::pair<std::string, std::string>;

/**
 * N finite T0-topologies on one vertex set, each given by the DAG of its
 * Hasse diagram. Topology i is tagged with the distinct prime primes[i].
 */
struct TopologyFamily {
  std::vector<std::string> vertices;
  std::vector<std::vector<LabeledEdge>> dags;
  std::vector<std::uint64_t> primes;

  friend bool operator==(const TopologyFamily&, const TopologyFamily&) = default;
};

struct UndirectedEdge {
  std::size_t u = 0;  // u < v
  std::size_t v = 0;

  friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

/**
 * Lossless encoding of a TopologyFamily as one simple undirected graph.
 *
 * w[e] is the product of the primes of the topologies containing edge e;
 * d[v][i] is the number of edges on a longest directed chain starting at v in
 * topology i.
 */
struct WeightedMultiGraph {
  std::vector<std::string> vertices;
  std::vector<UndirectedEdge> edges;  // sorted, parallel to w
  std::vector<std::uint64_t> w;
  std::vector<std::vector<std::uint32_t>> d;

  std::size_t topology_count() const { return d.empty() ? 0 : d.front().size(); }

  friend bool operator==(const WeightedMultiGraph&, const WeightedMultiGraph&) = default;
};

bool is_prime(std::uint64_t n);

/// The first `count` primes 2, 3, 5, ...
std::vector<std::uint64_t> first_primes(std::size_t count);

/// Throws CyclicInput, DuplicatePrime, NotPrime or InvalidInput.
void validate(const TopologyFamily& family);

/// Sorts every edge list and removes duplicate edges. Vertex order is kept.
TopologyFamily canonicalize(TopologyFamily family);

/// Longest chain length (edge count) from each vertex of a DAG on n vertices.
std::vector<std::uint32_t> chain_lengths(std::size_t n,
                                         std::span<const std::pair<std::size_t, std::size_t>> edges);

WeightedMultiGraph encode(const TopologyFamily& family);

/// Inverse of encode. The result is canonical (edge lists sorted).
TopologyFamily decode(const WeightedMultiGraph& graph, std::span<const std::uint64_t> primes);

}  // namespace ultradiff
