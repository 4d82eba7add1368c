#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ultradiff/multitopo.hpp"
#include "ultradiff/operators.hpp"
#include "ultradiff/padic.hpp"
#include "ultradiff/toposort.hpp"
#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

/// Everything derived from one weighted graph: d_E, delta, the dendrogram,
/// its p-adic embedding and the tree measure.
struct HierarchicalModel {
  WeightedGraph graph;
  DistanceMatrix distances;
  UltrametricMatrix ultrametric;
  Dendrogram dendrogram;
  DiscAssignment assign;
  TreeMeasure nu;

  KernelSpec kernel(Bullet bullet, double alpha) const;
  Discretization discretization(std::size_t n) const;
};

HierarchicalModel build_model(WeightedGraph graph, std::uint32_t min_prime = 2);

HierarchicalModel build_model(const WeightedMultiGraph& graph,
                              std::optional<std::vector<double>> weights = std::nullopt,
                              std::uint32_t min_prime = 2);

/// Dendrogram of a DAG's undirected distances. Vertices in different
/// components are placed at one more than the total edge length.
Dendrogram dag_dendrogram(const Dag& dag);

}  // namespace ultradiff
