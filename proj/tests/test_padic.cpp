#include <doctest.h>

#include <bit>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "ultradiff/error.hpp"
#include "ultradiff/padic.hpp"

using namespace ultradiff;
using testing_support::Rng;

namespace {

Dendrogram from_ultrametric(const Eigen::MatrixXd& u) {
  return build_dendrogram({u}, testing_support::labels(static_cast<std::size_t>(u.rows())));
}

Eigen::MatrixXd star(std::size_t n, double r) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, r);
  m.diagonal().setZero();
  return m;
}

}  // namespace

TEST_CASE("padic distance") {
  CHECK(padic_distance({3, {1, 2}}, {3, {1, 0}}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(padic_distance({3, {1, 2}}, {3, {1, 2}}) == 0.0);
  CHECK(padic_distance({2, {0, 1, 1}}, {2, {1, 1, 1}}) == 1.0);
  CHECK_THROWS_AS(padic_distance({2, {0}}, {3, {0}}), Error);
}

TEST_CASE("cell arithmetic") {
  PAdicCell ball{3, {2}};
  CHECK(ball.contains({3, {2, 0, 1}}));
  CHECK_FALSE(ball.contains({3, {1, 0}}));
  CHECK(ball.child(1) == PAdicCell{3, {2, 1}});
  CHECK(PAdicCell{3, {2, 1, 0}}.prefix(1) == ball);
  CHECK(common_prefix({2, {1, 0, 1}}, {2, {1, 0, 0}}) == 2);
  CHECK(inverse_power(2, 3) == 0.125);
}

TEST_CASE("cells below a ball") {
  const auto same = cells_below({2, {1, 0}}, 2);
  REQUIRE(same.size() == 1);
  CHECK(same[0] == PAdicCell{2, {1, 0}});

  const auto cells = cells_below({3, {2}}, 3);
  REQUIRE(cells.size() == 9);
  CHECK(cells.front() == PAdicCell{3, {2, 0, 0}});
  CHECK(cells[1] == PAdicCell{3, {2, 0, 1}});
  CHECK(cells.back() == PAdicCell{3, {2, 2, 2}});
  CHECK(std::is_sorted(cells.begin(), cells.end()));

  CHECK(cells_below({2, {}}, 4).size() == 16);
  CHECK(cells_below({2, {0, 1}}, 1).empty());
}

TEST_CASE("embedding examples") {
  const auto two = embed(from_ultrametric(star(2, 1.0)));
  CHECK(two.p == 2);
  CHECK(two.m == 1);
  CHECK(two.discs[0] == PAdicCell{2, {0}});
  CHECK(two.discs[1] == PAdicCell{2, {1}});

  CHECK(embed(from_ultrametric(star(5, 1.0))).p == 5);
  CHECK(embed(from_ultrametric(star(4, 1.0))).p == 5);
  CHECK(embed(from_ultrametric(star(2, 1.0)), 3).p == 3);

  const auto one = embed(from_ultrametric(Eigen::MatrixXd::Zero(1, 1)));
  CHECK(one.m == 0);
  CHECK(one.discs[0].level() == 0);
}

TEST_CASE("embedding is disjoint and compatible with delta") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = testing_support::uniform(rng, 2, 100);
    const Eigen::MatrixXd u = trial % 2 ? oracles::random_ultrametric(rng, n)
                                        : subdominant_ultrametric(testing_support::random_metric(rng, n)).entries;
    const auto dend = from_ultrametric(u);
    const auto assign = embed(dend);
    CHECK(assign.p >= dend.max_branching());
    for (std::size_t j = 1; j < assign.rho_table.size(); ++j) CHECK(assign.rho_table[j] < assign.rho_table[j - 1]);
    for (std::size_t a = 0; a < n; ++a) {
      CHECK(assign.discs[a].level() == assign.m);
      for (std::size_t b = a + 1; b < n; ++b) {
        CHECK_FALSE(assign.discs[a] == assign.discs[b]);
        const auto j = common_prefix(assign.discs[a], assign.discs[b]);
        CHECK(assign.rho(j) == u(a, b));
      }
    }
  }
}

TEST_CASE("tree measure") {
  Eigen::MatrixXd u(3, 3);
  u << 0, 1, 2, 1, 0, 2, 2, 2, 0;
  const auto dend = from_ultrametric(u);
  const auto nu = tree_measure(dend);
  const auto& root = dend.node(dend.root());
  CHECK(nu.of_node(dend.root()) == 1.0);
  CHECK(nu.of_node(root.children[0]) == 0.5);
  CHECK(nu.of_node(root.children[1]) == 0.5);
  CHECK(nu.of_node(dend.leaf(0)) == 0.25);
  CHECK(nu.of_node(dend.leaf(1)) == 0.25);

  CHECK(tree_measure(from_ultrametric(Eigen::MatrixXd::Zero(1, 1))).of_node(0) == 1.0);

  Eigen::MatrixXd binary(8, 8);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) binary(a, b) = a == b ? 0.0 : 1.0 + static_cast<double>(std::bit_width(unsigned(a ^ b)));
  }
  const auto balanced = from_ultrametric(binary);
  const auto nu8 = tree_measure(balanced);
  for (std::size_t v = 0; v < 8; ++v) CHECK(nu8.of_node(balanced.leaf(v)) == 0.125);
}

TEST_CASE("children share their parent's measure equally") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dend = from_ultrametric(oracles::random_ultrametric(rng, testing_support::uniform(rng, 1, 40)));
    const auto nu = tree_measure(dend);
    for (std::size_t id = 0; id < dend.node_count(); ++id) {
      const auto& node = dend.node(id);
      double total = 0.0;
      for (auto c : node.children) {
        CHECK(nu.of_node(c) == nu.of_node(node.children.front()));
        total += nu.of_node(c);
      }
      if (!node.is_leaf()) CHECK(total == doctest::Approx(nu.of_node(id)).epsilon(1e-15));
    }
  }
}

TEST_CASE("discretization") {
  const auto dend = from_ultrametric(star(2, 1.0));
  const auto assign = embed(dend);
  const auto nu = tree_measure(dend);
  const auto disc = discretize(assign, dend, nu, 2);
  CHECK(disc.size() == 4);
  for (const auto& c : disc.cells) CHECK(c.haar == 0.25);
  CHECK(disc.nu_total() == 1.0);
  CHECK(disc.haar_total() == 1.0);
  CHECK_THROWS_AS(discretize(assign, dend, nu, 1), Error);

  const auto three = from_ultrametric(star(3, 1.0));
  const auto a3 = embed(three);
  const auto d3 = discretize(a3, three, tree_measure(three), a3.m + 1);
  CHECK(d3.size() == 9);
}

TEST_CASE("discretization measures are additive") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dend = from_ultrametric(oracles::random_ultrametric(rng, testing_support::uniform(rng, 1, 12)));
    const auto assign = embed(dend);
    const auto nu = tree_measure(dend);
    const auto disc = discretize(assign, dend, nu, assign.m + 2);
    CHECK(disc.nu_total() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(disc.haar_total() ==
          doctest::Approx(static_cast<double>(dend.vertex_count()) * assign.disc_haar_volume()).epsilon(1e-14));
    std::vector<double> per_leaf(dend.vertex_count(), 0.0);
    for (const auto& c : disc.cells) per_leaf[*c.vertex] += c.nu;
    for (std::size_t v = 0; v < dend.vertex_count(); ++v) {
      CHECK(per_leaf[v] == doctest::Approx(nu.of_node(dend.leaf(v))).epsilon(1e-14));
    }
    std::set<PAdicCell> unique;
    for (const auto& c : disc.cells) unique.insert(c.cell);
    CHECK(unique.size() == disc.size());
  }
}

TEST_CASE("full p-ary tree: nu equals normalized Haar") {
  // Depth-2 binary tree with equal radii per level.
  Eigen::MatrixXd u(4, 4);
  u << 0, 1, 2, 2, 1, 0, 2, 2, 2, 2, 0, 1, 2, 2, 1, 0;
  const auto dend = from_ultrametric(u);
  const auto assign = embed(dend);
  const auto disc = discretize(assign, dend, tree_measure(dend), assign.m + 1);
  const double total = disc.haar_total();
  for (const auto& c : disc.cells) CHECK(c.nu == doctest::Approx(c.haar / total).epsilon(1e-15));
}
