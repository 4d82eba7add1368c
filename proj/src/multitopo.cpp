#include "ultradiff/multitopo.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "ultradiff/error.hpp"

namespace ultradiff {

namespace {

using IndexEdge = std::pair<std::size_t, std::size_t>;

std::map<std::string, std::size_t> index_vertices(const std::vector<std::string>& vertices) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!index.emplace(vertices[i], i).second) {
      throw Error(ErrorCode::InvalidInput, "duplicate vertex label '" + vertices[i] + "'");
    }
  }
  return index;
}

std::vector<IndexEdge> resolve_edges(const std::map<std::string, std::size_t>& index,
                                     const std::vector<LabeledEdge>& edges, std::size_t topology) {
  std::vector<IndexEdge> out;
  out.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto a = index.find(from);
    auto b = index.find(to);
    if (a == index.end() || b == index.end()) {
      throw Error(ErrorCode::InvalidInput, "topology " + std::to_string(topology) + ": edge " +
                                               from + "->" + to + " uses an unknown vertex");
    }
    if (a->second == b->second) {
      throw Error(ErrorCode::CyclicInput,
                  "topology " + std::to_string(topology) + ": self-loop at " + from);
    }
    out.emplace_back(a->second, b->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool acyclic(std::size_t n, std::span<const IndexEdge> edges) {
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : edges) {
    out[a].push_back(b);
    ++indegree[b];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++seen;
    for (auto t : out[v]) {
      if (--indegree[t] == 0) ready.push_back(t);
    }
  }
  return seen == n;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f <= n / f; f += 2) {
    if (n % f == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t candidate = 2; primes.size() < count; ++candidate) {
    if (is_prime(candidate)) primes.push_back(candidate);
  }
  return primes;
}

void validate(const TopologyFamily& family) {
  auto index = index_vertices(family.vertices);
  if (family.primes.size() != family.dags.size()) {
    throw Error(ErrorCode::InvalidInput, "expected one prime per topology (" +
                                             std::to_string(family.dags.size()) + " topologies, " +
                                             std::to_string(family.primes.size()) + " primes)");
  }
  std::set<std::uint64_t> seen;
  for (auto p : family.primes) {
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::DuplicatePrime, "prime " + std::to_string(p) + " assigned twice");
    }
  }
  for (std::size_t i = 0; i < family.dags.size(); ++i) {
    auto edges = resolve_edges(index, family.dags[i], i);
    if (!acyclic(family.vertices.size(), edges)) {
      throw Error(ErrorCode::CyclicInput, "topology " + std::to_string(i) + " contains a cycle");
    }
  }
}

TopologyFamily canonicalize(TopologyFamily family) {
  for (auto& dag : family.dags) {
    std::sort(dag.begin(), dag.end());
    dag.erase(std::unique(dag.begin(), dag.end()), dag.end());
  }
  return family;
}

std::vector<std::uint32_t> chain_lengths(std::size_t n, std::span<const IndexEdge> edges) {
  std::vector<std::vector<std::size_t>> in(n);
  std::vector<std::size_t> outdegree(n, 0);
  for (const auto& [a, b] : edges) {
    in[b].push_back(a);
    ++outdegree[a];
  }
  // Peel sinks first; a vertex is final once all its successors are.
  std::vector<std::uint32_t> length(n, 0);
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (outdegree[v] == 0) ready.push_back(v);
  }
  std::size_t done = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++done;
    for (auto a : in[v]) {
      length[a] = std::max(length[a], length[v] + 1);
      if (--outdegree[a] == 0) ready.push_back(a);
    }
  }
  if (done != n) throw Error(ErrorCode::CyclicInput, "chain lengths requested for a cyclic graph");
  return length;
}

WeightedMultiGraph encode(const TopologyFamily& family) {
  validate(family);
  auto index = index_vertices(family.vertices);
  const std::size_t n = family.vertices.size();
  const std::size_t topologies = family.dags.size();

  WeightedMultiGraph graph;
  graph.vertices = family.vertices;
  graph.d.assign(n, std::vector<std::uint32_t>(topologies, 0));

  std::map<UndirectedEdge, std::uint64_t> weights;
  for (std::size_t i = 0; i < topologies; ++i) {
    auto edges = resolve_edges(index, family.dags[i], i);
    auto lengths = chain_lengths(n, edges);
    for (std::size_t v = 0; v < n; ++v) graph.d[v][i] = lengths[v];

    const std::uint64_t p = family.primes[i];
    for (const auto& [a, b] : edges) {
      UndirectedEdge e{std::min(a, b), std::max(a, b)};
      auto it = weights.emplace(e, 1).first;
      if (it->second > std::numeric_limits<std::uint64_t>::max() / p) {
        throw Error(ErrorCode::InvalidInput, "edge weight overflows 64 bits");
      }
      it->second *= p;
    }
  }
  for (const auto& [e, weight] : weights) {
    graph.edges.push_back(e);
    graph.w.push_back(weight);
  }
  return graph;
}

TopologyFamily decode(const WeightedMultiGraph& graph, std::span<const std::uint64_t> primes) {
  const std::size_t topologies = primes.size();
  if (graph.edges.size() != graph.w.size() || graph.d.size() != graph.vertices.size()) {
    throw Error(ErrorCode::InvalidInput, "inconsistent graph arrays");
  }
  for (const auto& dims : graph.d) {
    if (dims.size() != topologies) {
      throw Error(ErrorCode::InvalidInput, "dimension vectors do not match the prime list");
    }
  }

  TopologyFamily family;
  family.vertices = graph.vertices;
  family.primes.assign(primes.begin(), primes.end());
  family.dags.resize(topologies);

  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto [u, v] = graph.edges[k];
    if (u >= graph.vertices.size() || v >= graph.vertices.size()) {
      throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
    }
    std::uint64_t rest = graph.w[k];
    if (rest == 0) throw Error(ErrorCode::InvalidInput, "zero edge weight");
    for (std::size_t i = 0; i < topologies; ++i) {
      const std::uint64_t p = primes[i];
      if (rest % p != 0) continue;
      rest /= p;
      const auto du = graph.d[u][i];
      const auto dv = graph.d[v][i];
      if (du == dv) {
        throw Error(ErrorCode::AmbiguousOrientation,
                    "edge " + graph.vertices[u] + "-" + graph.vertices[v] + " in topology " +
                        std::to_string(i) + " joins two vertices of dimension " +
                        std::to_string(du));
      }
      if (du > dv) {
        family.dags[i].emplace_back(graph.vertices[u], graph.vertices[v]);
      } else {
        family.dags[i].emplace_back(graph.vertices[v], graph.vertices[u]);
      }
    }
    if (rest != 1) {
      throw Error(ErrorCode::UnknownPrimeFactor,
                  "weight " + std::to_string(graph.w[k]) + " of edge " + graph.vertices[u] + "-" +
                      graph.vertices[v] + " has factor " + std::to_string(rest) +
                      " outside the prime list");
    }
  }
  return canonicalize(std::move(family));
}

}  // namespace ultradiff
