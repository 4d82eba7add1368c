#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ultradiff/multitopo.hpp"
#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

/**
 * Directed graph over label-sorted vertices. Vertex index order equals label
 * order, so "smallest index" is the Kahn tie-break everywhere.
 */
class Dag {
public:
  Dag() = default;
  /// Vertices are sorted by label; edges may carry lengths (default 1).
  Dag(std::vector<std::string> vertices, const std::vector<LabeledEdge>& edges,
      std::vector<double> lengths = {});

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index(const std::string& label) const;
  const std::vector<std::size_t>& successors(std::size_t v) const { return out_[v]; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  const std::vector<double>& lengths() const { return lengths_; }

  /// Undirected weighted graph on the same vertex order (parallel edges keep the shortest).
  WeightedGraph undirected() const;

  /// Vertices reachable from v by a non-empty path.
  std::vector<bool> reachable_from(std::size_t v) const;

private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<double> lengths_;
};

/// Kahn's algorithm on the edges inside `members` (all vertices if empty),
/// smallest index first among ready vertices. Throws CycleDetected.
std::vector<std::size_t> kahn_sort(const Dag& dag, std::span<const std::size_t> members = {});

struct SortedCluster {
  std::vector<std::size_t> members;  // sorted
  std::vector<std::size_t> order;

  friend bool operator==(const SortedCluster&, const SortedCluster&) = default;
};

enum class ClusterRelation { Disjoint, LeftInsideRight, RightInsideLeft, Equal };

const char* to_string(ClusterRelation relation);

/// Order of the dag induced on `members` (reachability restricted to the set) as edges.
std::vector<std::pair<std::size_t, std::size_t>> induced_order(const Dag& dag,
                                                               std::span<const std::size_t> members);

/// Transitive reduction of an acyclic edge set over local indices 0..n-1.
std::vector<std::pair<std::size_t, std::size_t>> transitive_reduction(
    std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

/// Minimal cluster U(x) with a topological order of the dag induced on it.
SortedCluster cluster_sort(const Dendrogram& dendrogram, const Dag& dag, std::size_t x);

ClusterRelation compare_clusters(const Dendrogram& dendrogram, std::size_t x, std::size_t y);

/**
 * Sorts X = left ∪ right under the dag order on X plus the chains of both
 * input orders. Throws CycleDetected when the two chains and the dag
 * disagree.
 */
SortedCluster merge_sorted_clusters(const Dag& dag, const SortedCluster& left,
                                    const SortedCluster& right);

struct ParallelSortOptions {
  std::size_t parallelism = 1;
};

struct ParallelSortStats {
  std::size_t clusters = 0;   // distinct clusters after phase 1
  std::size_t rounds = 0;     // reduction rounds in phase 2
  std::size_t merges = 0;
  std::size_t conflicts = 0;  // merges whose chains disagreed and were re-sorted
  bool degenerate = false;    // single non-trivial cluster: plain Kahn
};

struct ParallelSortResult {
  std::vector<std::size_t> order;
  ParallelSortStats stats;
};

ParallelSortResult parallel_toposort(const Dag& dag, const Dendrogram& dendrogram,
                                     std::span<const std::size_t> seeds,
                                     ParallelSortOptions options = {});

/// True if every edge of the dag points forward in `order` and order is a permutation.
bool is_linear_extension(const Dag& dag, std::span<const std::size_t> order);

}  // namespace ultradiff
