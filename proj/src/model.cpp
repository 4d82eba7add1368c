#include "ultradiff/model.hpp"

#include <numeric>
#include <span>

namespace ultradiff {

KernelSpec HierarchicalModel::kernel(Bullet bullet, double alpha) const {
  switch (bullet) {
    case Bullet::Adjacency: return KernelSpec::adjacency(graph, alpha);
    case Bullet::GraphDistance: return KernelSpec::graph_distance(distances, alpha);
    case Bullet::Ultrametric: break;
  }
  return KernelSpec::ultrametric(ultrametric, alpha);
}

Discretization HierarchicalModel::discretization(std::size_t n) const {
  return discretize(assign, dendrogram, nu, n);
}

HierarchicalModel build_model(WeightedGraph graph, std::uint32_t min_prime) {
  HierarchicalModel model;
  model.distances = graph_distances(graph);
  model.ultrametric = subdominant_ultrametric(model.distances);
  model.dendrogram = build_dendrogram(model.ultrametric, graph.vertices);
  model.assign = embed(model.dendrogram, min_prime);
  model.nu = tree_measure(model.dendrogram);
  model.graph = std::move(graph);
  return model;
}

HierarchicalModel build_model(const WeightedMultiGraph& graph, std::optional<std::vector<double>> weights,
                              std::uint32_t min_prime) {
  std::optional<std::span<const double>> view;
  if (weights) view = std::span<const double>(*weights);
  return build_model(distance_graph(graph, view), min_prime);
}

Dendrogram dag_dendrogram(const Dag& dag) {
  const auto graph = dag.undirected();
  const double total = std::accumulate(dag.lengths().begin(), dag.lengths().end(), 0.0);
  const auto d = graph_distances(graph, total + 1.0);
  return build_dendrogram(subdominant_ultrametric(d), graph.vertices);
}

}  // namespace ultradiff
