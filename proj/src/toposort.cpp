#include "ultradiff/toposort.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

#include "ultradiff/error.hpp"
#include "ultradiff/parallel.hpp"

namespace ultradiff {

namespace {

using Edge = std::pair<std::size_t, std::size_t>;
constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Kahn over an explicit vertex set (sorted global ids) and edges between them.
std::vector<std::size_t> kahn_local(std::span<const std::size_t> members,
                                    std::span<const Edge> edges, std::size_t universe) {
  std::vector<std::size_t> local(universe, npos);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  const std::size_t k = members.size();
  std::vector<std::vector<std::size_t>> out(k);
  std::vector<std::size_t> indegree(k, 0);
  for (const auto& [a, b] : edges) {
    out[local[a]].push_back(local[b]);
    ++indegree[local[b]];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < k; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(k);
  while (!ready.empty()) {
    auto i = ready.top();
    ready.pop();
    order.push_back(members[i]);
    for (auto j : out[i]) {
      if (--indegree[j] == 0) ready.push(j);
    }
  }
  if (order.size() != k) {
    throw Error(ErrorCode::CycleDetected, std::to_string(k - order.size()) +
                                              " of " + std::to_string(k) +
                                              " vertices lie on or behind a cycle");
  }
  return order;
}

std::vector<std::size_t> sorted_union(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void append_chain(std::span<const std::size_t> order, std::vector<Edge>& edges) {
  for (std::size_t i = 1; i < order.size(); ++i) edges.emplace_back(order[i - 1], order[i]);
}

// Reduced edge set realizing the induced order and both chains; throws on conflict.
std::vector<Edge> merged_hasse(const Dag& dag, std::span<const std::size_t> members,
                               const SortedCluster& left, const SortedCluster& right) {
  auto edges = induced_order(dag, members);
  append_chain(left.order, edges);
  append_chain(right.order, edges);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // Kahn first: the reduction is only defined for acyclic input.
  kahn_local(members, edges, dag.size());

  std::vector<std::size_t> local(dag.size(), npos);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  std::vector<Edge> local_edges;
  local_edges.reserve(edges.size());
  for (const auto& [a, b] : edges) local_edges.emplace_back(local[a], local[b]);
  auto reduced = transitive_reduction(members.size(), local_edges);
  for (auto& [a, b] : reduced) {
    a = members[a];
    b = members[b];
  }
  return reduced;
}

}  // namespace

Dag::Dag(std::vector<std::string> vertices, const std::vector<LabeledEdge>& edges,
         std::vector<double> lengths)
    : labels_(std::move(vertices)) {
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw Error(ErrorCode::InvalidInput, "duplicate vertex label");
  }
  if (!lengths.empty() && lengths.size() != edges.size()) {
    throw Error(ErrorCode::InvalidInput, "edge length list does not match the edge list");
  }
  std::map<Edge, double> unique;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    Edge e{index(edges[k].first), index(edges[k].second)};
    double length = lengths.empty() ? 1.0 : lengths[k];
    auto [it, fresh] = unique.emplace(e, length);
    if (!fresh) it->second = std::min(it->second, length);
  }
  out_.resize(labels_.size());
  for (const auto& [e, length] : unique) {
    edges_.push_back(e);
    lengths_.push_back(length);
    out_[e.first].push_back(e.second);
  }
}

std::size_t Dag::index(const std::string& label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    throw Error(ErrorCode::InvalidInput, "unknown vertex '" + label + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

WeightedGraph Dag::undirected() const {
  std::map<Edge, double> unique;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    auto [a, b] = edges_[k];
    if (a == b) continue;
    Edge e{std::min(a, b), std::max(a, b)};
    auto [it, fresh] = unique.emplace(e, lengths_[k]);
    if (!fresh) it->second = std::min(it->second, lengths_[k]);
  }
  WeightedGraph graph;
  graph.vertices = labels_;
  for (const auto& [e, length] : unique) graph.edges.push_back({e.first, e.second, length});
  return graph;
}

std::vector<bool> Dag::reachable_from(std::size_t v) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack(out_[v].begin(), out_[v].end());
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    if (seen[x]) continue;
    seen[x] = true;
    for (auto y : out_[x]) {
      if (!seen[y]) stack.push_back(y);
    }
  }
  return seen;
}

std::vector<std::size_t> kahn_sort(const Dag& dag, std::span<const std::size_t> members) {
  std::vector<std::size_t> all;
  if (members.empty()) {
    all.resize(dag.size());
    std::iota(all.begin(), all.end(), 0);
  } else {
    all.assign(members.begin(), members.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
  }
  std::vector<bool> inside(dag.size(), false);
  for (auto v : all) inside.at(v) = true;
  std::vector<Edge> edges;
  for (const auto& e : dag.edges()) {
    if (inside[e.first] && inside[e.second]) edges.push_back(e);
  }
  return kahn_local(all, edges, dag.size());
}

const char* to_string(ClusterRelation relation) {
  switch (relation) {
    case ClusterRelation::Disjoint: return "Disjoint";
    case ClusterRelation::LeftInsideRight: return "LeftInsideRight";
    case ClusterRelation::RightInsideLeft: return "RightInsideLeft";
    case ClusterRelation::Equal: return "Equal";
  }
  return "?";
}

std::vector<Edge> induced_order(const Dag& dag, std::span<const std::size_t> members) {
  std::vector<bool> inside(dag.size(), false);
  for (auto v : members) inside.at(v) = true;
  std::vector<Edge> edges;
  for (auto a : members) {
    auto reach = dag.reachable_from(a);
    if (reach[a]) {
      throw Error(ErrorCode::CycleDetected, "vertex " + dag.labels()[a] + " lies on a cycle");
    }
    for (auto b : members) {
      if (reach[b]) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::vector<Edge> transitive_reduction(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  auto order = kahn_local(all, edges, n);
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : edges) out[a].push_back(b);
  for (auto& succ : out) {
    std::sort(succ.begin(), succ.end(),
              [&](std::size_t x, std::size_t y) { return position[x] < position[y]; });
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
  }

  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> descendants(n, std::vector<std::uint64_t>(words, 0));
  auto test = [](const std::vector<std::uint64_t>& bits, std::size_t i) {
    return (bits[i / 64] >> (i % 64)) & 1u;
  };
  std::vector<Edge> reduced;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto a = *it;
    auto& covered = descendants[a];
    // Successors in topological order: a later one is redundant iff an
    // earlier kept one already reaches it.
    for (auto b : out[a]) {
      if (!test(covered, b)) reduced.emplace_back(a, b);
      covered[b / 64] |= std::uint64_t{1} << (b % 64);
      for (std::size_t w = 0; w < words; ++w) covered[w] |= descendants[b][w];
    }
  }
  std::sort(reduced.begin(), reduced.end());
  return reduced;
}

SortedCluster cluster_sort(const Dendrogram& dendrogram, const Dag& dag, std::size_t x) {
  if (x >= dag.size()) throw Error(ErrorCode::InvalidInput, "seed vertex out of range");
  SortedCluster cluster;
  cluster.members = minimal_cluster(dendrogram, x);
  auto edges = induced_order(dag, cluster.members);
  cluster.order = kahn_local(cluster.members, edges, dag.size());
  return cluster;
}

ClusterRelation compare_clusters(const Dendrogram& dendrogram, std::size_t x, std::size_t y) {
  auto ux = minimal_cluster(dendrogram, x);
  auto uy = minimal_cluster(dendrogram, y);
  const bool x_in_uy = std::binary_search(uy.begin(), uy.end(), x);
  const bool y_in_ux = std::binary_search(ux.begin(), ux.end(), y);
  if (x_in_uy && y_in_ux) return ClusterRelation::Equal;
  if (x_in_uy) return ClusterRelation::LeftInsideRight;
  if (y_in_ux) return ClusterRelation::RightInsideLeft;
  return ClusterRelation::Disjoint;
}

SortedCluster merge_sorted_clusters(const Dag& dag, const SortedCluster& left,
                                    const SortedCluster& right) {
  SortedCluster merged;
  merged.members = sorted_union(left.members, right.members);
  auto hasse = merged_hasse(dag, merged.members, left, right);
  merged.order = kahn_local(merged.members, hasse, dag.size());
  return merged;
}

ParallelSortResult parallel_toposort(const Dag& dag, const Dendrogram& dendrogram,
                                     std::span<const std::size_t> seeds,
                                     ParallelSortOptions options) {
  if (dendrogram.vertex_count() != dag.size()) {
    throw Error(ErrorCode::InvalidInput, "dendrogram and dag have different vertex sets");
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidInput, "no seed vertices");
  for (auto s : seeds) {
    if (s >= dag.size()) throw Error(ErrorCode::InvalidInput, "seed vertex out of range");
  }

  ParallelSortResult result;
  const auto& root = dendrogram.node(dendrogram.root());
  const bool single_cluster =
      std::all_of(root.children.begin(), root.children.end(),
                  [&](std::size_t c) { return dendrogram.node(c).is_leaf(); });
  if (single_cluster) {
    result.stats.degenerate = true;
    result.stats.clusters = 1;
    result.order = kahn_sort(dag);
    return result;
  }

  // Phase 1: sorted minimal clusters of all seeds.
  std::vector<SortedCluster> sorted(seeds.size());
  parallel_for(seeds.size(), options.parallelism,
               [&](std::size_t i) { sorted[i] = cluster_sort(dendrogram, dag, seeds[i]); });

  std::vector<SortedCluster> clusters;
  std::vector<bool> covered(dag.size(), false);
  for (auto& c : sorted) {
    bool duplicate = std::any_of(clusters.begin(), clusters.end(),
                                 [&](const SortedCluster& k) { return k.members == c.members; });
    if (duplicate) continue;
    for (auto v : c.members) covered[v] = true;
    clusters.push_back(std::move(c));
  }
  for (std::size_t v = 0; v < dag.size(); ++v) {
    if (!covered[v]) clusters.push_back({{v}, {v}});
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const SortedCluster& a, const SortedCluster& b) {
                     return a.members.front() < b.members.front();
                   });
  result.stats.clusters = clusters.size();

  // Phase 2: binary reduction, pairs (0,1), (2,3), ... merged concurrently.
  while (clusters.size() > 1) {
    const std::size_t pairs = clusters.size() / 2;
    std::vector<SortedCluster> next(pairs + clusters.size() % 2);
    std::vector<char> conflict(pairs, 0);
    parallel_for(pairs, options.parallelism, [&](std::size_t i) {
      const auto& a = clusters[2 * i];
      const auto& b = clusters[2 * i + 1];
      try {
        next[i] = merge_sorted_clusters(dag, a, b);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CycleDetected) throw;
        // The two local orders disagree; fall back to the dag order on X alone.
        SortedCluster merged;
        merged.members = sorted_union(a.members, b.members);
        merged.order = kahn_local(merged.members, induced_order(dag, merged.members), dag.size());
        next[i] = std::move(merged);
        conflict[i] = 1;
      }
    });
    if (clusters.size() % 2 == 1) next.back() = std::move(clusters.back());
    result.stats.merges += pairs;
    result.stats.conflicts += static_cast<std::size_t>(std::count(conflict.begin(), conflict.end(), 1));
    ++result.stats.rounds;
    clusters = std::move(next);
  }
  result.order = std::move(clusters.front().order);
  return result;
}

bool is_linear_extension(const Dag& dag, std::span<const std::size_t> order) {
  if (order.size() != dag.size()) return false;
  std::vector<std::size_t> position(dag.size(), npos);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= dag.size() || position[order[i]] != npos) return false;
    position[order[i]] = i;
  }
  return std::all_of(dag.edges().begin(), dag.edges().end(),
                     [&](const Edge& e) { return position[e.first] < position[e.second]; });
}

}  // namespace ultradiff
