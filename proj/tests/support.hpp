#pragma once

// Random instance generators shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ultradiff/model.hpp"
#include "ultradiff/multitopo.hpp"
#include "ultradiff/toposort.hpp"
#include "ultradiff/ultraindex.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline std::vector<std::string> labels(std::size_t n, const std::string& prefix = "v") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random acyclic edge set: edges follow a random permutation, each with probability `density`.
inline std::vector<ultradiff::LabeledEdge> random_dag_edges(Rng& rng, const std::vector<std::string>& vertices,
                                                            double density) {
  std::vector<std::size_t> perm(vertices.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(density);
  std::vector<ultradiff::LabeledEdge> edges;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (coin(rng)) edges.emplace_back(vertices[perm[i]], vertices[perm[j]]);
    }
  }
  return edges;
}

inline ultradiff::TopologyFamily random_family(Rng& rng, std::size_t max_topologies, std::size_t max_vertices) {
  ultradiff::TopologyFamily family;
  family.vertices = labels(uniform(rng, 1, max_vertices));
  std::shuffle(family.vertices.begin(), family.vertices.end(), rng);
  const std::size_t n = uniform(rng, 1, max_topologies);
  auto pool = ultradiff::first_primes(12);
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    family.dags.push_back(random_dag_edges(rng, family.vertices, uniform_real(rng, 0.0, 0.3)));
    family.primes.push_back(pool[i]);
  }
  return ultradiff::canonicalize(family);
}

/// Connected graph: a random spanning tree plus extra edges, lengths drawn from `lengths`.
inline ultradiff::WeightedGraph random_connected_graph(Rng& rng, std::size_t n, double extra,
                                                       const std::vector<double>& lengths) {
  ultradiff::WeightedGraph g;
  g.vertices = labels(n);
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  auto pick = [&] { return lengths[uniform(rng, 0, lengths.size() - 1)]; };
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t u = uniform(rng, 0, v - 1);
    g.edges.push_back({u, v, pick()});
    used[u][v] = true;
  }
  std::bernoulli_distribution coin(extra);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!used[u][v] && coin(rng)) g.edges.push_back({u, v, pick()});
    }
  }
  return g;
}

inline ultradiff::WeightedGraph random_connected_graph(Rng& rng, std::size_t n, double extra = 0.3) {
  std::vector<double> lengths;
  for (int i = 0; i < 6; ++i) lengths.push_back(uniform_real(rng, 0.5, 4.0));
  return random_connected_graph(rng, n, extra, lengths);
}

/// Metric from shortest paths on a random complete graph with small integer lengths.
inline ultradiff::DistanceMatrix random_metric(Rng& rng, std::size_t n) {
  auto g = random_connected_graph(rng, n, 1.0, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  return ultradiff::graph_distances(g);
}

inline ultradiff::Dag random_dag(Rng& rng, std::size_t n, double density) {
  auto vertices = labels(n, "x");
  auto edges = random_dag_edges(rng, vertices, density);
  std::vector<double> lengths;
  for (std::size_t k = 0; k < edges.size(); ++k) lengths.push_back(static_cast<double>(uniform(rng, 1, 5)));
  return ultradiff::Dag(vertices, edges, lengths);
}

}  // namespace testing_support
