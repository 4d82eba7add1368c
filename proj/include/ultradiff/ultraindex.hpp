#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultradiff/multitopo.hpp"

namespace ultradiff {

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

/// Simple undirected graph with positive edge lengths.
struct WeightedGraph {
  std::vector<std::string> vertices;
  std::vector<WeightedEdge> edges;
};

/// Distance graph of an encoded family. Each edge gets length 1/log(w(e)+1)
/// unless `explicit_weights` (parallel to graph.edges) is given.
WeightedGraph distance_graph(const WeightedMultiGraph& graph,
                             std::optional<std::span<const double>> explicit_weights = std::nullopt);

struct DistanceMatrix {
  Eigen::MatrixXd entries;
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

struct UltrametricMatrix {
  Eigen::MatrixXd entries;
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

/// All-pairs shortest paths (Dijkstra from every vertex). Throws DisconnectedGraph.
DistanceMatrix graph_distances(const WeightedGraph& graph);
/// Same, with `unreachable` (if set) standing in for the distance between components.
DistanceMatrix graph_distances(const WeightedGraph& graph, std::optional<double> unreachable);

/// Largest ultrametric below `d`: minimax path distance, computed from a
/// minimum spanning tree by single-linkage merging.
UltrametricMatrix subdominant_ultrametric(const DistanceMatrix& d);

bool is_ultrametric(const Eigen::MatrixXd& m, double tolerance = 0.0);

struct DendrogramNode {
  std::vector<std::size_t> members;  // sorted vertex indices
  double radius = 0.0;               // 0 for leaves
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  std::size_t level = 0;             // root is level 0

  bool is_leaf() const { return children.empty(); }
};

/**
 * Tree of the distinct balls of an ultrametric. Children of every node are
 * ordered by their smallest member label; equal merge heights produce one
 * polytomous node.
 */
class Dendrogram {
public:
  Dendrogram() = default;
  Dendrogram(std::vector<std::string> labels, std::vector<DendrogramNode> nodes, std::size_t root);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  const DendrogramNode& node(std::size_t id) const { return nodes_.at(id); }
  const std::vector<DendrogramNode>& nodes() const { return nodes_; }
  std::size_t root() const { return root_; }
  std::size_t leaf(std::size_t vertex) const { return leaf_of_vertex_.at(vertex); }
  std::size_t max_level() const { return max_level_; }
  std::size_t max_branching() const;

  std::size_t lca(std::size_t u, std::size_t v) const;
  bool contains(std::size_t node, std::size_t vertex) const;
  /// Nodes at a given level, in id order.
  std::vector<std::size_t> nodes_at_level(std::size_t level) const;
  /// Smallest member label of a node; the canonical child ordering key.
  const std::string& smallest_label(std::size_t node) const;

private:
  std::vector<std::string> labels_;
  std::vector<DendrogramNode> nodes_;
  std::size_t root_ = 0;
  std::vector<std::size_t> leaf_of_vertex_;
  std::size_t max_level_ = 0;
};

/// Throws InvalidInput if `delta` is not an ultrametric with positive off-diagonal entries.
Dendrogram build_dendrogram(const UltrametricMatrix& delta, std::vector<std::string> labels);

/// Member set of the parent of leaf x: the smallest non-singleton ball
/// containing x ({x} for a one-vertex tree).
std::vector<std::size_t> minimal_cluster(const Dendrogram& dendrogram, std::size_t x);

}  // namespace ultradiff
