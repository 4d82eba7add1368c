#include "ultradiff/ultraindex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "ultradiff/error.hpp"

namespace ultradiff {

WeightedGraph distance_graph(const WeightedMultiGraph& graph,
                             std::optional<std::span<const double>> explicit_weights) {
  if (explicit_weights && explicit_weights->size() != graph.edges.size()) {
    throw Error(ErrorCode::InvalidInput, "explicit weight list does not match the edge list");
  }
  WeightedGraph out;
  out.vertices = graph.vertices;
  out.edges.reserve(graph.edges.size());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    double length = explicit_weights ? (*explicit_weights)[k]
                                     : 1.0 / std::log(static_cast<double>(graph.w[k]) + 1.0);
    out.edges.push_back({graph.edges[k].u, graph.edges[k].v, length});
  }
  return out;
}

DistanceMatrix graph_distances(const WeightedGraph& graph) { return graph_distances(graph, std::nullopt); }

DistanceMatrix graph_distances(const WeightedGraph& graph, std::optional<double> unreachable) {
  const std::size_t n = graph.vertices.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(n);
  for (const auto& e : graph.edges) {
    if (e.u >= n || e.v >= n) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidInput, "edge " + graph.vertices[e.u] + "-" +
                                               graph.vertices[e.v] + " has non-positive length");
    }
    adjacency[e.u].emplace_back(e.v, e.weight);
    adjacency[e.v].emplace_back(e.u, e.weight);
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  DistanceMatrix d{Eigen::MatrixXd::Constant(n, n, inf)};
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    auto row = d.entries.row(s);
    row(s) = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      auto [dist, v] = queue.top();
      queue.pop();
      if (dist > row(v)) continue;
      for (auto [t, length] : adjacency[v]) {
        if (dist + length < row(t)) {
          row(t) = dist + length;
          queue.emplace(row(t), t);
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (row(t) == inf) {
        if (unreachable) {
          row(t) = *unreachable;
          continue;
        }
        throw Error(ErrorCode::DisconnectedGraph,
                    graph.vertices[s] + " cannot reach " + graph.vertices[t]);
      }
    }
  }
  // Dijkstra from both ends can differ in the last bit; keep the matrix exactly symmetric.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double m = std::min(d.entries(i, j), d.entries(j, i));
      d.entries(i, j) = d.entries(j, i) = m;
    }
  }
  return d;
}

UltrametricMatrix subdominant_ultrametric(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (d.entries.cols() != d.entries.rows()) {
    throw Error(ErrorCode::InvalidInput, "distance matrix is not square");
  }
  UltrametricMatrix delta{Eigen::MatrixXd::Zero(n, n)};
  if (n < 2) return delta;

  // Prim on the complete graph, O(n^2).
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, inf);
  std::vector<std::size_t> via(n, 0);
  std::vector<bool> in_tree(n, false);
  struct TreeEdge {
    double weight;
    std::size_t a, b;
  };
  std::vector<TreeEdge> tree;
  tree.reserve(n - 1);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      if (d(current, v) < best[v]) {
        best[v] = d(current, v);
        via[v] = current;
      }
      if (next == n || best[v] < best[next]) next = v;
    }
    in_tree[next] = true;
    tree.push_back({best[next], via[next], next});
    current = next;
  }

  // Single linkage: merging two clusters at height h fixes delta across them.
  std::sort(tree.begin(), tree.end(),
            [](const TreeEdge& x, const TreeEdge& y) { return x.weight < y.weight; });
  std::vector<std::size_t> cluster(n);
  std::iota(cluster.begin(), cluster.end(), 0);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t v = 0; v < n; ++v) members[v] = {v};
  for (const auto& e : tree) {
    auto ca = cluster[e.a];
    auto cb = cluster[e.b];
    if (members[ca].size() < members[cb].size()) std::swap(ca, cb);
    for (auto x : members[ca]) {
      for (auto y : members[cb]) {
        delta.entries(x, y) = delta.entries(y, x) = e.weight;
      }
    }
    for (auto y : members[cb]) cluster[y] = ca;
    members[ca].insert(members[ca].end(), members[cb].begin(), members[cb].end());
    members[cb].clear();
  }
  return delta;
}

bool is_ultrametric(const Eigen::MatrixXd& m, double tolerance) {
  const auto n = m.rows();
  if (m.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) return false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (m(i, j) != m(j, i) || m(i, j) < 0.0) return false;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (m(i, k) > std::max(m(i, j), m(j, k)) + tolerance) return false;
      }
    }
  }
  return true;
}

Dendrogram::Dendrogram(std::vector<std::string> labels, std::vector<DendrogramNode> nodes,
                       std::size_t root)
    : labels_(std::move(labels)), nodes_(std::move(nodes)), root_(root) {
  leaf_of_vertex_.assign(labels_.size(), nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const auto& n = nodes_[id];
    if (n.is_leaf()) {
      if (n.members.size() != 1) throw Error(ErrorCode::InvalidInput, "leaf with several members");
      leaf_of_vertex_.at(n.members.front()) = id;
    }
    max_level_ = std::max(max_level_, n.level);
  }
  for (auto id : leaf_of_vertex_) {
    if (id == nodes_.size()) throw Error(ErrorCode::InvalidInput, "vertex without a leaf");
  }
}

std::size_t Dendrogram::max_branching() const {
  std::size_t branching = 0;
  for (const auto& n : nodes_) branching = std::max(branching, n.children.size());
  return branching;
}

std::size_t Dendrogram::lca(std::size_t u, std::size_t v) const {
  auto a = leaf(u);
  auto b = leaf(v);
  while (nodes_[a].level > nodes_[b].level) a = *nodes_[a].parent;
  while (nodes_[b].level > nodes_[a].level) b = *nodes_[b].parent;
  while (a != b) {
    a = *nodes_[a].parent;
    b = *nodes_[b].parent;
  }
  return a;
}

bool Dendrogram::contains(std::size_t node, std::size_t vertex) const {
  const auto& m = nodes_.at(node).members;
  return std::binary_search(m.begin(), m.end(), vertex);
}

std::vector<std::size_t> Dendrogram::nodes_at_level(std::size_t level) const {
  std::vector<std::size_t> out;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].level == level) out.push_back(id);
  }
  return out;
}

const std::string& Dendrogram::smallest_label(std::size_t node) const {
  const auto& m = nodes_.at(node).members;
  auto it = std::min_element(m.begin(), m.end(), [this](std::size_t a, std::size_t b) {
    return labels_[a] < labels_[b];
  });
  return labels_[*it];
}

namespace {

struct Builder {
  const Eigen::MatrixXd& delta;
  const std::vector<std::string>& labels;
  std::vector<DendrogramNode> nodes;

  std::size_t build(std::vector<std::size_t> members, std::optional<std::size_t> parent,
                    std::size_t level) {
    std::sort(members.begin(), members.end());
    double radius = 0.0;
    for (auto a : members) {
      for (auto b : members) radius = std::max(radius, delta(a, b));
    }
    const std::size_t id = nodes.size();
    nodes.push_back({members, radius, {}, parent, level});
    if (members.size() == 1) return id;

    // Open balls of radius `radius` partition an ultrametric ball.
    std::vector<std::vector<std::size_t>> parts;
    std::vector<bool> placed(members.size(), false);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (placed[i]) continue;
      std::vector<std::size_t> part;
      for (std::size_t j = i; j < members.size(); ++j) {
        if (!placed[j] && delta(members[i], members[j]) < radius) {
          placed[j] = true;
          part.push_back(members[j]);
        }
      }
      parts.push_back(std::move(part));
    }
    auto min_label = [this](const std::vector<std::size_t>& part) {
      std::string best = labels[part.front()];
      for (auto v : part) best = std::min(best, labels[v]);
      return best;
    };
    std::sort(parts.begin(), parts.end(),
              [&](const auto& x, const auto& y) { return min_label(x) < min_label(y); });
    std::vector<std::size_t> children;
    for (auto& part : parts) children.push_back(build(std::move(part), id, level + 1));
    nodes[id].children = std::move(children);
    return id;
  }
};

}  // namespace

Dendrogram build_dendrogram(const UltrametricMatrix& delta, std::vector<std::string> labels) {
  const std::size_t n = delta.size();
  if (n == 0) throw Error(ErrorCode::InvalidInput, "empty vertex set");
  if (labels.size() != n) throw Error(ErrorCode::InvalidInput, "label count does not match matrix");
  // The cubic check is skipped on large inputs; subdominant_ultrametric output is exact.
  if (n <= 512 && !is_ultrametric(delta.entries)) {
    throw Error(ErrorCode::InvalidInput, "matrix violates the strong triangle inequality");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !(delta(i, j) > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "distinct vertices at ultrametric distance 0");
      }
    }
  }
  Builder builder{delta.entries, labels, {}};
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  auto root = builder.build(std::move(all), std::nullopt, 0);
  return Dendrogram(std::move(labels), std::move(builder.nodes), root);
}

std::vector<std::size_t> minimal_cluster(const Dendrogram& dendrogram, std::size_t x) {
  const auto& leaf = dendrogram.node(dendrogram.leaf(x));
  if (!leaf.parent) return leaf.members;
  std::vector<std::size_t> ball;
  for (auto child : dendrogram.node(*leaf.parent).children) {
    const auto& m = dendrogram.node(child).members;
    ball.insert(ball.end(), m.begin(), m.end());
  }
  std::sort(ball.begin(), ball.end());
  return ball;
}

}  // namespace ultradiff
