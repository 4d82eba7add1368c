#include "ultradiff/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "ultradiff/error.hpp"

namespace ultradiff {

namespace {

template <class F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

std::vector<LabeledEdge> edges_from_json(const json& list) {
  std::vector<LabeledEdge> edges;
  for (const auto& e : list) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ParseError, "edge must be a pair of labels");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return edges;
}

std::map<std::string, std::size_t> label_index(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      throw Error(ErrorCode::InvalidInput, "duplicate vertex label '" + labels[i] + "'");
    }
  }
  return index;
}

std::size_t lookup(const std::map<std::string, std::size_t>& index, const std::string& label) {
  auto it = index.find(label);
  if (it == index.end()) throw Error(ErrorCode::InvalidInput, "unknown vertex '" + label + "'");
  return it->second;
}

json dendrogram_node(const Dendrogram& dendrogram, std::size_t id) {
  const auto& node = dendrogram.node(id);
  json out = json::object();
  out["radius"] = node.radius;
  if (node.is_leaf()) {
    out["leaf"] = dendrogram.labels()[node.members.front()];
  } else {
    out["children"] = json::array();
    for (auto child : node.children) out["children"].push_back(dendrogram_node(dendrogram, child));
  }
  return out;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

TopologyFamily family_from_json(const json& j) {
  return parsing("topology family", [&] {
    TopologyFamily family;
    family.vertices = j.at("vertices").get<std::vector<std::string>>();
    for (const auto& t : j.at("topologies")) family.dags.push_back(edges_from_json(t.at("edges")));
    if (j.contains("primes")) {
      family.primes = j.at("primes").get<std::vector<std::uint64_t>>();
    } else {
      family.primes = first_primes(family.dags.size());
    }
    return family;
  });
}

json to_json(const TopologyFamily& family) {
  json out = json::object();
  out["vertices"] = family.vertices;
  out["topologies"] = json::array();
  for (const auto& dag : family.dags) {
    json edges = json::array();
    for (const auto& [a, b] : dag) edges.push_back({a, b});
    out["topologies"].push_back({{"edges", edges}});
  }
  out["primes"] = family.primes;
  return out;
}

WeightedGraph GraphFile::distance_graph() const {
  if (encoded) {
    std::optional<std::span<const double>> view;
    if (weights) view = std::span<const double>(*weights);
    return ultradiff::distance_graph(*encoded, view);
  }
  WeightedGraph out;
  out.vertices = vertices;
  for (std::size_t k = 0; k < edges.size(); ++k) out.edges.push_back({edges[k].u, edges[k].v, (*weights)[k]});
  return out;
}

GraphFile graph_from_json(const json& j) {
  return parsing("graph", [&] {
    GraphFile file;
    file.vertices = j.at("vertices").get<std::vector<std::string>>();
    const auto index = label_index(file.vertices);
    const auto labeled = edges_from_json(j.at("edges"));
    const bool has_w = j.contains("w");
    if (!has_w && !j.contains("weights")) {
      throw Error(ErrorCode::ParseError, "graph needs \"w\" or \"weights\"");
    }
    std::vector<std::uint64_t> w;
    std::vector<double> weights;
    if (has_w) w = j.at("w").get<std::vector<std::uint64_t>>();
    if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
    if ((has_w && w.size() != labeled.size()) || (!weights.empty() && weights.size() != labeled.size())) {
      throw Error(ErrorCode::ParseError, "edge attribute lists differ in length from \"edges\"");
    }

    std::vector<std::size_t> order(labeled.size());
    std::vector<UndirectedEdge> edges;
    for (const auto& [a, b] : labeled) {
      auto u = lookup(index, a);
      auto v = lookup(index, b);
      if (u == v) throw Error(ErrorCode::InvalidInput, "self-loop at '" + a + "'");
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return edges[x] < edges[y]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (edges[order[k]] == edges[order[k - 1]]) throw Error(ErrorCode::InvalidInput, "repeated edge");
    }
    for (auto k : order) file.edges.push_back(edges[k]);
    if (!weights.empty()) {
      std::vector<double> sorted;
      for (auto k : order) sorted.push_back(weights[k]);
      file.weights = std::move(sorted);
    }

    if (has_w) {
      WeightedMultiGraph g;
      g.vertices = file.vertices;
      g.edges = file.edges;
      for (auto k : order) g.w.push_back(w[k]);
      file.primes = j.at("primes").get<std::vector<std::uint64_t>>();
      const auto& d = j.at("d");
      for (const auto& label : file.vertices) {
        auto row = d.at(label).get<std::vector<std::uint32_t>>();
        if (row.size() != file.primes.size()) {
          throw Error(ErrorCode::ParseError, "dimension vector of '" + label + "' has the wrong length");
        }
        g.d.push_back(std::move(row));
      }
      file.encoded = std::move(g);
    }
    return file;
  });
}

json to_json(const WeightedMultiGraph& graph, const std::vector<std::uint64_t>& primes) {
  json out = json::object();
  out["vertices"] = graph.vertices;
  out["primes"] = primes;
  json edges = json::array();
  for (const auto& e : graph.edges) edges.push_back({graph.vertices[e.u], graph.vertices[e.v]});
  out["edges"] = edges;
  out["w"] = graph.w;
  json d = json::object();
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) d[graph.vertices[v]] = graph.d[v];
  out["d"] = d;
  return out;
}

json to_json(const Dendrogram& dendrogram) { return dendrogram_node(dendrogram, dendrogram.root()); }

json to_json(const DiscAssignment& assign, const std::vector<std::string>& labels) {
  json out = json::object();
  out["p"] = assign.p;
  out["m"] = assign.m;
  out["rho"] = assign.rho_table;
  json discs = json::object();
  for (std::size_t v = 0; v < assign.discs.size(); ++v) discs[labels.at(v)] = assign.discs[v].digits;
  out["discs"] = discs;
  return out;
}

Dag dag_from_json(const json& j) {
  return parsing("dag", [&] {
    const auto edges = edges_from_json(j.at("edges"));
    std::vector<std::string> vertices;
    if (j.contains("vertices")) {
      vertices = j.at("vertices").get<std::vector<std::string>>();
    } else {
      std::set<std::string> seen;
      for (const auto& [a, b] : edges) {
        seen.insert(a);
        seen.insert(b);
      }
      vertices.assign(seen.begin(), seen.end());
    }
    std::vector<double> lengths;
    if (j.contains("lengths")) lengths = j.at("lengths").get<std::vector<double>>();
    return Dag(std::move(vertices), edges, std::move(lengths));
  });
}

}  // namespace ultradiff
