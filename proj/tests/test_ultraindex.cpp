#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "ultradiff/error.hpp"
#include "ultradiff/ultraindex.hpp"

using namespace ultradiff;
using testing_support::Rng;

namespace {

WeightedGraph path_graph() { return {{"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 2.0}}}; }

}  // namespace

TEST_CASE("graph distances on small graphs") {
  const auto d = graph_distances(path_graph());
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 2) == 2.0);
  CHECK(d(0, 2) == 3.0);
  CHECK(d(2, 0) == 3.0);

  const auto single = graph_distances({{"a"}, {}});
  CHECK(single.size() == 1);
  CHECK(single(0, 0) == 0.0);

  const auto triangle = graph_distances({{"a", "b", "c"}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}});
  CHECK(triangle(0, 2) == 1.0);

  CHECK_THROWS_AS(graph_distances({{"a", "b"}, {}}), Error);
  const auto filled = graph_distances({{"a", "b"}, {}}, 7.0);
  CHECK(filled(0, 1) == 7.0);
}

TEST_CASE("distances satisfy the triangle inequality") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = graph_distances(testing_support::random_connected_graph(rng, 20));
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d(i, i) == 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) {
        CHECK(d(i, j) == d(j, i));
        for (std::size_t k = 0; k < d.size(); ++k) CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
      }
    }
  }
}

TEST_CASE("subdominant ultrametric of the path") {
  const auto delta = subdominant_ultrametric(graph_distances(path_graph()));
  CHECK(delta(0, 1) == 1.0);
  CHECK(delta(1, 2) == 2.0);
  CHECK(delta(0, 2) == 2.0);
}

TEST_CASE("subdominant ultrametric fixed points") {
  Rng rng(17);
  const Eigen::MatrixXd u = oracles::random_ultrametric(rng, 7);
  CHECK(subdominant_ultrametric({u}).entries == u);

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 4, 2.5);
  flat.diagonal().setZero();
  CHECK(subdominant_ultrametric({flat}).entries == flat);
}

TEST_CASE("subdominant ultrametric matches the minimax oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto d = testing_support::random_metric(rng, testing_support::uniform(rng, 1, 8));
    const auto delta = subdominant_ultrametric(d);
    CHECK(delta.entries == oracles::minimax_matrix(d.entries));
    CHECK(is_ultrametric(delta.entries));
    CHECK((delta.entries.array() <= d.entries.array()).all());
    CHECK(subdominant_ultrametric({delta.entries}).entries == delta.entries);
  }
}

TEST_CASE("dendrogram of the path") {
  const auto delta = subdominant_ultrametric(graph_distances(path_graph()));
  const auto dend = build_dendrogram(delta, {"a", "b", "c"});
  const auto& root = dend.node(dend.root());
  CHECK(root.radius == 2.0);
  CHECK(root.members == std::vector<std::size_t>{0, 1, 2});
  REQUIRE(root.children.size() == 2);
  const auto& ab = dend.node(root.children[0]);
  CHECK(ab.members == std::vector<std::size_t>{0, 1});
  CHECK(ab.radius == 1.0);
  CHECK(ab.level == 1);
  CHECK(dend.node(root.children[1]).members == std::vector<std::size_t>{2});
  CHECK(dend.max_level() == 2);

  CHECK(minimal_cluster(dend, 0) == std::vector<std::size_t>{0, 1});
  CHECK(minimal_cluster(dend, 2) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("degenerate dendrograms") {
  const auto one = build_dendrogram({Eigen::MatrixXd::Zero(1, 1)}, {"x"});
  CHECK(one.node_count() == 1);
  CHECK(minimal_cluster(one, 0) == std::vector<std::size_t>{0});

  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(5, 5, 1.0);
  flat.diagonal().setZero();
  const auto star = build_dendrogram({flat}, testing_support::labels(5));
  CHECK(star.node(star.root()).children.size() == 5);
  CHECK(star.max_branching() == 5);
}

TEST_CASE("dendrogram invariants on random ultrametrics") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = testing_support::uniform(rng, 2, 25);
    const auto delta = subdominant_ultrametric(testing_support::random_metric(rng, n));
    const auto dend = build_dendrogram(delta, testing_support::labels(n));
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u != v) CHECK(dend.node(dend.lca(u, v)).radius == delta(u, v));
      }
    }
    for (const auto& node : dend.nodes()) {
      std::vector<std::size_t> merged;
      for (auto c : node.children) {
        const auto& child = dend.node(c);
        CHECK(child.radius < node.radius);
        CHECK(child.level == node.level + 1);
        merged.insert(merged.end(), child.members.begin(), child.members.end());
      }
      if (!node.is_leaf()) {
        std::sort(merged.begin(), merged.end());
        CHECK(merged == node.members);
        for (std::size_t i = 1; i < node.children.size(); ++i) {
          CHECK(dend.smallest_label(node.children[i - 1]) < dend.smallest_label(node.children[i]));
        }
      }
    }
  }
}

TEST_CASE("non-ultrametric input is rejected") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  CHECK_THROWS_AS(build_dendrogram({d}, {"a", "b", "c"}), Error);
}
