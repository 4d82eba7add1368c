#include <doctest.h>

#include <complex>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "ultradiff/error.hpp"
#include "ultradiff/model.hpp"
#include "ultradiff/spectra.hpp"

using namespace ultradiff;
using testing_support::Rng;

namespace {

constexpr double residual_tolerance = 1e-9;

HierarchicalModel ultrametric_model(const Eigen::MatrixXd& u, std::uint32_t min_prime = 2) {
  HierarchicalModel model;
  model.ultrametric = {u};
  model.distances = {u};
  model.dendrogram = build_dendrogram(model.ultrametric, testing_support::labels(static_cast<std::size_t>(u.rows())));
  model.assign = embed(model.dendrogram, min_prime);
  model.nu = tree_measure(model.dendrogram);
  return model;
}

Eigen::MatrixXd star(std::size_t n, double r) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, r);
  m.diagonal().setZero();
  return m;
}

std::complex<double> inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const Eigen::VectorXd& w) {
  return a.dot(w.cast<std::complex<double>>().cwiseProduct(b));
}

}  // namespace

TEST_CASE("root of unity identity") {
  for (int n = 2; n <= 7; ++n) {
    for (int j = 0; j < n; ++j) {
      const auto zeta = [&](int k) { return std::polar(1.0, 2.0 * M_PI * k / n); };
      std::complex<double> sum = 0.0;
      for (int l = 0; l < n; ++l) {
        if (l != j) sum += zeta(j) - zeta(l);
      }
      CHECK(std::abs(sum - static_cast<double>(n) * zeta(j)) < 1e-12);
    }
  }
}

TEST_CASE("kozyrev wavelet shape") {
  const auto model = ultrametric_model(star(2, 1.0));  // p = 2, m = 1
  const auto disc = model.discretization(2);
  const auto weights = cell_weights(disc, MeasureKind::Haar);
  const PAdicCell ball = model.assign.discs[0];
  const auto psi = kozyrev_wavelet(model.assign, disc, ball, 1);
  // |B| = 1/2: values +-sqrt(2) on the two children.
  CHECK(psi(0).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(psi(1).real() == doctest::Approx(-std::sqrt(2.0)));
  CHECK(psi(2) == std::complex<double>(0.0));
  CHECK(std::abs(inner(psi, psi, weights) - 1.0) < 1e-14);

  const auto other = kozyrev_wavelet(model.assign, disc, model.assign.discs[1], 1);
  CHECK(std::abs(inner(psi, other, weights)) < 1e-15);

  CHECK_THROWS_AS(kozyrev_wavelet(model.assign, disc, ball, 0), Error);
  CHECK_THROWS_AS(kozyrev_wavelet(model.assign, disc, ball, 2), Error);
  CHECK_THROWS_AS(kozyrev_wavelet(model.assign, disc, PAdicCell{2, {}}, 1), Error);
}

TEST_CASE("kozyrev characters are orthogonal for p = 3") {
  const auto model = ultrametric_model(star(3, 1.0));
  const auto disc = model.discretization(model.assign.m + 2);
  const auto weights = cell_weights(disc, MeasureKind::Haar);
  const auto& ball = model.assign.discs[1];
  const auto a = kozyrev_wavelet(model.assign, disc, ball, 1);
  const auto b = kozyrev_wavelet(model.assign, disc, ball, 2);
  CHECK(std::abs(inner(a, b, weights)) < 1e-14);
  CHECK(std::abs(a.cwiseProduct(weights.cast<std::complex<double>>()).sum()) < 1e-14);
}

TEST_CASE("kozyrev closed form on a single disc") {
  // One vertex, p = 3 forced, alpha = 1: m = 0, ball Z_3 at d = 0 and
  // its children at d = 1.
  const auto model = ultrametric_model(Eigen::MatrixXd::Zero(1, 1), 3);
  REQUIRE(model.assign.p == 3);
  REQUIRE(model.assign.m == 0);
  const auto spec = KernelSpec::ultrametric(model.ultrametric, 1.0);
  const PAdicCell ball{3, {0}};
  CHECK(kozyrev_eigenvalue_printed(spec, model.assign, ball) == doctest::Approx(-17.0));
  const double lambda = kozyrev_eigenvalue(spec, model.assign, ball);
  CHECK(lambda == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));

  const auto disc = model.discretization(3);
  const auto a = generator(spec, model.assign, disc, MeasureKind::Haar);
  for (std::size_t j = 1; j <= 2; ++j) {
    const auto psi = kozyrev_wavelet(model.assign, disc, ball, j);
    CHECK(verify_eigenpair(a, psi, lambda) <= residual_tolerance);
    CHECK(verify_eigenpair(a, psi, -17.0) > 1.0 / 17.0);
  }
}

TEST_CASE("second vertex shifts the eigenvalue by -k mu") {
  Eigen::MatrixXd u = star(2, 1.0);
  const auto model = ultrametric_model(u, 3);  // p = 3, m = 1, mu(U_w) = 1/3
  const auto spec = KernelSpec::ultrametric(model.ultrametric, 1.0);
  PAdicCell ball = model.assign.discs[0].child(0);
  const double local = kozyrev_local_eigenvalue(3, 1.0, 1, 2);
  CHECK(kozyrev_eigenvalue(spec, model.assign, ball) == doctest::Approx(local - 1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("local eigenvalue is strictly decreasing in d") {
  for (std::uint32_t p : {2u, 3u, 5u}) {
    for (double alpha : {1.0, 2.0}) {
      for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t d = m; d < m + 5; ++d) {
          CHECK(kozyrev_local_eigenvalue(p, alpha, m, d + 1) < kozyrev_local_eigenvalue(p, alpha, m, d));
        }
      }
    }
  }
}

TEST_CASE("laplacian block modes") {
  const Eigen::VectorXd one_weight = Eigen::VectorXd::Ones(1);
  const auto single = laplacian_block_modes(KernelSpec::ultrametric({Eigen::MatrixXd::Zero(1, 1)}, 1.0), one_weight);
  REQUIRE(single.size() == 1);
  CHECK(single[0].lambda == 0.0);

  // Two vertices, rate r = 1/2 (delta = 2), volumes h = 1/4: {0, -2 r h}.
  const auto spec = KernelSpec::ultrametric({star(2, 2.0)}, 1.0);
  const auto modes = laplacian_block_modes(spec, Eigen::Vector2d(0.25, 0.25));
  REQUIRE(modes.size() == 2);
  CHECK(modes[0].lambda == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(std::abs(modes[1].lambda) < 1e-15);

  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = build_model(testing_support::random_connected_graph(rng, testing_support::uniform(rng, 2, 8)));
    Eigen::VectorXd w(model.graph.vertices.size());
    for (auto& x : w) x = testing_support::uniform_real(rng, 0.1, 1.0);
    for (auto bullet : {Bullet::Adjacency, Bullet::GraphDistance, Bullet::Ultrametric}) {
      for (const auto& mode : laplacian_block_modes(model.kernel(bullet, 1.0), w)) CHECK(mode.lambda <= 1e-12);
    }
  }
}

TEST_CASE("equal-rate block modes form a multiplet") {
  const auto spec = KernelSpec::ultrametric({star(4, 1.0)}, 1.0);
  const auto modes = laplacian_block_modes(spec, Eigen::VectorXd::Constant(4, 0.25));
  CHECK(modes[0].multiplet == modes[1].multiplet);
  CHECK(modes[1].multiplet == modes[2].multiplet);
  CHECK(modes[3].multiplet != modes[2].multiplet);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double dot = (modes[i].vector.array() * modes[j].vector.array() * 0.25).sum();
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-13);
    }
  }
}

TEST_CASE("ultrametric wavelets") {
  Eigen::MatrixXd u = star(2, 3.0);
  const auto model = ultrametric_model(u);
  const auto disc = model.discretization(model.assign.m + 1);
  const auto root = model.dendrogram.root();
  const auto psi = ultrametric_wavelet(model.dendrogram, model.nu, disc, root, 1);
  const auto w = cell_weights(disc, MeasureKind::Nu);
  CHECK(psi(0).real() == doctest::Approx(1.0));
  CHECK(psi(disc.size() - 1).real() == doctest::Approx(-1.0));
  CHECK(std::abs(psi.dot(w.cast<std::complex<double>>())) < 1e-15);
  CHECK_THROWS_AS(ultrametric_wavelet(model.dendrogram, model.nu, disc, root, 0), Error);
  CHECK_THROWS_AS(ultrametric_wavelet(model.dendrogram, model.nu, disc, model.dendrogram.leaf(0), 1), Error);

  // Root with two children at distance r, nu = 1/2 each: gamma = -1/r.
  const double gamma = ultrametric_eigenvalue(model.dendrogram, model.nu, root, 1.0);
  CHECK(gamma == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  const auto a = generator(KernelSpec::ultrametric(model.ultrametric, 1.0), model.assign, disc, MeasureKind::Nu);
  CHECK(verify_eigenpair(a, psi, gamma) <= residual_tolerance);
}

TEST_CASE("three equal children share one eigenvalue") {
  // Root -> {a,b,c} (radius 1) and {d}: the inner node has c = 3.
  Eigen::MatrixXd u = star(4, 1.0);
  for (int i = 0; i < 3; ++i) u(i, 3) = u(3, i) = 2.0;
  const auto model = ultrametric_model(u);
  const auto disc = model.discretization(model.assign.m + 1);
  const auto a = generator(KernelSpec::ultrametric(model.ultrametric, 1.5), model.assign, disc, MeasureKind::Nu);
  const auto inner_node = model.dendrogram.node(model.dendrogram.root()).children[0];
  const double gamma = ultrametric_eigenvalue(model.dendrogram, model.nu, inner_node, 1.5);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto psi = ultrametric_wavelet(model.dendrogram, model.nu, disc, inner_node, k);
    CHECK(verify_eigenpair(a, psi, gamma) <= 1e-10);
  }
  const double printed = ultrametric_eigenvalue_printed(model.dendrogram, model.nu, inner_node, 1.5);
  const auto psi = ultrametric_wavelet(model.dendrogram, model.nu, disc, inner_node, 1);
  CHECK(verify_eigenpair(a, psi, printed) > 1e-3);
}

TEST_CASE("verify_eigenpair") {
  const auto model = ultrametric_model(star(2, 1.0));
  const auto disc = model.discretization(model.assign.m + 1);
  const auto a = generator(KernelSpec::ultrametric(model.ultrametric, 1.0), model.assign, disc, MeasureKind::Haar);
  CHECK(verify_eigenpair(a, Eigen::VectorXcd::Ones(disc.size()), 0.0) == 0.0);
  const auto psi = kozyrev_wavelet(model.assign, disc, model.assign.discs[0], 1);
  const double lambda = kozyrev_eigenvalue(KernelSpec::ultrametric(model.ultrametric, 1.0), model.assign, model.assign.discs[0]);
  CHECK(verify_eigenpair(a, psi, lambda) <= residual_tolerance);
  CHECK(verify_eigenpair(a, psi, lambda + 1.0) >= 0.5 / std::max(1.0, std::abs(lambda + 1.0)));
  CHECK_THROWS_AS(verify_eigenpair(a, Eigen::VectorXcd::Ones(3), 0.0), Error);
}

TEST_CASE("full basis counts and completeness") {
  const auto model = ultrametric_model(star(2, 1.0));  // p = 2, m = 1
  const auto disc = model.discretization(2);
  const auto spec = KernelSpec::ultrametric(model.ultrametric, 1.0);
  const auto haar = generator(spec, model.assign, disc, MeasureKind::Haar);
  const auto basis_h = full_basis(spec, model.assign, model.dendrogram, model.nu, disc, haar);
  CHECK(std::count_if(basis_h.begin(), basis_h.end(), [](auto& e) { return e.kind == ModeKind::Kozyrev; }) == 2);
  CHECK(std::count_if(basis_h.begin(), basis_h.end(), [](auto& e) { return e.kind == ModeKind::Block; }) == 2);

  const auto nu = generator(spec, model.assign, disc, MeasureKind::Nu);
  const auto basis_n = full_basis(spec, model.assign, model.dendrogram, model.nu, disc, nu);
  CHECK(std::count_if(basis_n.begin(), basis_n.end(), [](auto& e) { return e.kind == ModeKind::Constant; }) == 1);
  CHECK(std::count_if(basis_n.begin(), basis_n.end(), [](auto& e) { return e.kind == ModeKind::Ultrametric; }) == 1);
  CHECK(std::count_if(basis_n.begin(), basis_n.end(), [](auto& e) { return e.kind == ModeKind::Kozyrev; }) == 2);
}

TEST_CASE("full basis on random models") {
  Rng rng(46);
  for (int trial = 0; trial < 12; ++trial) {
    const auto model = build_model(testing_support::random_connected_graph(rng, testing_support::uniform(rng, 1, 5)));
    const auto disc = model.discretization(model.assign.m + 1 + trial % 2);
    if (disc.size() > 300) continue;
    for (auto bullet : {Bullet::Adjacency, Bullet::GraphDistance, Bullet::Ultrametric}) {
      for (auto measure : {MeasureKind::Haar, MeasureKind::Nu}) {
        const auto spec = model.kernel(bullet, 1.0 + trial % 2);
        const auto a = generator(spec, model.assign, disc, measure);
        const auto basis = full_basis(spec, model.assign, model.dendrogram, model.nu, disc, a, 2);
        REQUIRE(basis.size() == disc.size());
        const auto id = Eigen::MatrixXcd::Identity(disc.size(), disc.size());
        CHECK((gram_matrix(basis, a.weights) - id).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((projector_sum(basis, a.weights) - id).cwiseAbs().maxCoeff() <= 1e-10);
        for (const auto& e : basis) {
          CHECK(e.residual <= residual_tolerance);
          CHECK(e.lambda <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("spectrum export") {
  const auto model = ultrametric_model(star(2, 1.0));
  const auto disc = model.discretization(2);
  const auto spec = KernelSpec::ultrametric(model.ultrametric, 1.0);
  const auto a = generator(spec, model.assign, disc, MeasureKind::Nu);
  std::ostringstream out;
  write_spectrum(out, full_basis(spec, model.assign, model.dendrogram, model.nu, disc, a));
  const std::string text = out.str();
  CHECK(text.rfind("kind\tsupport\tindex\tlambda\tresidual\tmultiplet\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
