#include "ultradiff/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ultradiff/error.hpp"
#include "ultradiff/parallel.hpp"

namespace ultradiff {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;
constexpr double degenerate_gap = 1e-9;

std::complex<double> root_of_unity(std::size_t k, std::size_t a, std::size_t n) {
  const double angle = two_pi * static_cast<double>((k * a) % n) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

bool near(double a, double b) {
  return std::abs(a - b) < degenerate_gap * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

const char* to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::Kozyrev: return "kozyrev";
    case ModeKind::Ultrametric: return "ultrametric";
    case ModeKind::Block: return "block";
    case ModeKind::Constant: return "constant";
  }
  return "?";
}

double verify_eigenpair(const GeneratorMatrix& a, const Eigen::VectorXcd& psi, double lambda) {
  if (static_cast<std::size_t>(psi.size()) != a.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(psi.size()) +
                                                  " against a " + std::to_string(a.size()) +
                                                  "-cell generator");
  }
  const Eigen::VectorXcd r = a.apply(psi) - lambda * psi;
  return r.cwiseAbs().maxCoeff() / std::max(1.0, std::abs(lambda));
}

std::size_t vertex_of_ball(const DiscAssignment& assign, const PAdicCell& ball) {
  auto v = assign.vertex_of(ball);
  if (!v) throw Error(ErrorCode::BallOutsideZ, "ball " + ball.to_string() + " is not inside a vertex disc");
  return *v;
}

Eigen::VectorXcd kozyrev_wavelet(const DiscAssignment& assign, const Discretization& disc,
                                 const PAdicCell& ball, std::size_t j, MeasureKind measure) {
  vertex_of_ball(assign, ball);
  if (j == 0 || j >= assign.p) {
    throw Error(ErrorCode::BadJ, "j=" + std::to_string(j) + " outside 1.." + std::to_string(assign.p - 1));
  }
  const std::size_t d = ball.level();
  if (disc.level <= d) {
    throw Error(ErrorCode::LevelTooCoarse, "wavelet on a level-" + std::to_string(d) +
                                               " ball needs cells of level > " + std::to_string(d));
  }
  const double amplitude = std::pow(static_cast<double>(assign.p), 0.5 * static_cast<double>(d));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(disc.size());
  for (std::size_t i = 0; i < disc.size(); ++i) {
    const auto& c = disc.cells[i];
    if (!ball.contains(c.cell)) continue;
    double scale = amplitude;
    if (measure == MeasureKind::Nu) scale /= std::sqrt(c.nu / c.haar);
    psi(i) = scale * root_of_unity(j, c.cell.digits[d], assign.p);
  }
  return psi;
}

double kozyrev_local_eigenvalue(std::uint32_t p, double alpha, std::size_t m, std::size_t d) {
  const double pd = static_cast<double>(p);
  double shell = 0.0;
  for (std::size_t k = m; k < d; ++k) shell += std::pow(pd, static_cast<double>(k) * (alpha - 1.0));
  return -(1.0 - 1.0 / pd) * shell - std::pow(pd, static_cast<double>(d) * (alpha - 1.0));
}

Eigen::VectorXd vertex_measures(const DiscAssignment& assign, const Dendrogram& dendrogram,
                                const TreeMeasure& nu, MeasureKind measure) {
  Eigen::VectorXd out(assign.discs.size());
  for (std::size_t v = 0; v < assign.discs.size(); ++v) {
    out(v) = measure == MeasureKind::Haar ? assign.disc_haar_volume()
                                          : nu.of_node(dendrogram.leaf(v));
  }
  return out;
}

double kozyrev_eigenvalue(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& ball,
                          const Eigen::VectorXd& disc_measures) {
  const std::size_t v = vertex_of_ball(assign, ball);
  if (static_cast<std::size_t>(disc_measures.size()) != assign.discs.size() ||
      spec.size() != assign.discs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "vertex count differs between kernel and embedding");
  }
  const double density = disc_measures(v) / assign.disc_haar_volume();
  double exterior = 0.0;
  for (std::size_t w = 0; w < assign.discs.size(); ++w) {
    if (w != v) exterior += spec.rate(v, w) * disc_measures(w);
  }
  return density * kozyrev_local_eigenvalue(assign.p, spec.alpha, assign.m, ball.level()) - exterior;
}

double kozyrev_eigenvalue(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& ball) {
  return kozyrev_eigenvalue(
      spec, assign, ball,
      Eigen::VectorXd::Constant(assign.discs.size(), assign.disc_haar_volume()));
}

double kozyrev_eigenvalue_printed(const KernelSpec& spec, const DiscAssignment& assign,
                                  const PAdicCell& ball) {
  const std::size_t v = vertex_of_ball(assign, ball);
  const double pd = assign.p;
  const double d = static_cast<double>(ball.level());
  const double m = static_cast<double>(assign.m);
  double exterior = 0.0;
  for (std::size_t w = 0; w < assign.discs.size(); ++w) {
    if (w != v) exterior += spec.rate(v, w) * assign.disc_haar_volume();
  }
  return 1.0 - std::pow(pd, d * (1.0 + spec.alpha)) * (std::pow(pd, -m * (1.0 + spec.alpha)) + 1.0) -
         exterior;
}

Eigen::VectorXcd ultrametric_wavelet(const Dendrogram& dendrogram, const TreeMeasure& nu,
                                     const Discretization& disc, std::size_t node, std::size_t k) {
  const auto& n = dendrogram.node(node);
  if (n.is_leaf()) throw Error(ErrorCode::LeafNode, "node " + std::to_string(node) + " is a leaf");
  const std::size_t c = n.children.size();
  if (k == 0) throw Error(ErrorCode::TrivialCharacter, "character index 0 is the trivial character");
  if (k >= c) {
    throw Error(ErrorCode::InvalidInput, "character index " + std::to_string(k) + " outside 1.." +
                                             std::to_string(c - 1));
  }
  std::vector<std::optional<std::size_t>> child_of(dendrogram.vertex_count());
  for (std::size_t i = 0; i < c; ++i) {
    for (auto v : dendrogram.node(n.children[i]).members) child_of[v] = i;
  }
  const double amplitude = 1.0 / std::sqrt(nu.of_node(node));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(disc.size());
  for (std::size_t x = 0; x < disc.size(); ++x) {
    const auto& vertex = disc.cells[x].vertex;
    if (vertex && child_of[*vertex]) psi(x) = amplitude * root_of_unity(k, *child_of[*vertex], c);
  }
  return psi;
}

double ultrametric_eigenvalue(const Dendrogram& dendrogram, const TreeMeasure& nu, std::size_t node,
                              double alpha) {
  const auto& n = dendrogram.node(node);
  double gamma = -std::pow(n.radius, -alpha) * nu.of_node(node);
  std::size_t current = node;
  while (auto parent = dendrogram.node(current).parent) {
    gamma -= std::pow(dendrogram.node(*parent).radius, -alpha) *
             (nu.of_node(*parent) - nu.of_node(current));
    current = *parent;
  }
  return gamma;
}

double ultrametric_eigenvalue_printed(const Dendrogram& dendrogram, const TreeMeasure& nu,
                                      std::size_t node, double alpha) {
  const auto& n = dendrogram.node(node);
  if (n.is_leaf()) throw Error(ErrorCode::LeafNode, "node " + std::to_string(node) + " is a leaf");
  const double c = static_cast<double>(n.children.size());
  const double outside_child = nu.of_node(node) - nu.of_node(n.children.front());
  return -std::pow(n.radius, -alpha) * c * outside_child;
}

std::vector<BlockMode> laplacian_block_modes(const KernelSpec& spec,
                                             const Eigen::VectorXd& vertex_weights) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  if (vertex_weights.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "vertex weights differ from kernel size");
  }
  // D^{1/2} L D^{-1/2} = D^{1/2} K D^{1/2} off the diagonal.
  const Eigen::VectorXd root = vertex_weights.cwiseSqrt();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    double row = 0.0;
    for (Eigen::Index w = 0; w < n; ++w) {
      if (w == v) continue;
      const double k = spec.rate(v, w);
      row += k * vertex_weights(w);
      s(v, w) = root(v) * k * root(w);
    }
    s(v, v) = -row;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidInput, "symmetric eigensolve did not converge");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors();

  std::vector<BlockMode> modes(n);
  std::size_t group = 0;
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && near(values(end - 1), values(end))) ++end;
    // Joint re-orthogonalization of the cluster, two passes of Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = start; i < end; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) vectors.col(i) -= vectors.col(j).dot(vectors.col(i)) * vectors.col(j);
        vectors.col(i).normalize();
      }
    }
    for (Eigen::Index i = start; i < end; ++i) {
      modes[i].lambda = values(i);
      modes[i].vector = vectors.col(i).cwiseQuotient(root);
      modes[i].multiplet = group;
    }
    ++group;
    start = end;
  }
  return modes;
}

std::vector<EigenPair> full_basis(const KernelSpec& spec, const DiscAssignment& assign,
                                  const Dendrogram& dendrogram, const TreeMeasure& nu,
                                  const Discretization& disc, const GeneratorMatrix& a,
                                  std::size_t parallelism) {
  if (a.size() != disc.size()) {
    throw Error(ErrorCode::DimensionMismatch, "generator and discretization sizes differ");
  }
  const MeasureKind measure = a.measure;
  const Eigen::VectorXd disc_measure = vertex_measures(assign, dendrogram, nu, measure);
  std::vector<EigenPair> basis;
  basis.reserve(disc.size());

  for (std::size_t v = 0; v < assign.discs.size(); ++v) {
    for (std::size_t d = assign.m; d < disc.level; ++d) {
      for (const auto& ball : cells_below(assign.discs[v], d)) {
        const double lambda = kozyrev_eigenvalue(spec, assign, ball, disc_measure);
        for (std::size_t j = 1; j < assign.p; ++j) {
          basis.push_back({ModeKind::Kozyrev, ball.to_string(), j, lambda,
                           kozyrev_wavelet(assign, disc, ball, j, measure), 0.0, 0});
        }
      }
    }
  }

  if (measure == MeasureKind::Nu && spec.bullet == Bullet::Ultrametric) {
    basis.push_back({ModeKind::Constant, "-", 0, 0.0,
                     Eigen::VectorXcd::Constant(disc.size(), 1.0 / std::sqrt(disc.nu_total())), 0.0, 0});
    for (std::size_t id = 0; id < dendrogram.node_count(); ++id) {
      const auto& node = dendrogram.node(id);
      if (node.is_leaf()) continue;
      const double gamma = ultrametric_eigenvalue(dendrogram, nu, id, spec.alpha);
      for (std::size_t k = 1; k < node.children.size(); ++k) {
        basis.push_back({ModeKind::Ultrametric, std::to_string(id), k, gamma,
                         ultrametric_wavelet(dendrogram, nu, disc, id, k), 0.0, 0});
      }
    }
  } else {
    const auto modes = laplacian_block_modes(spec, disc_measure);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      Eigen::VectorXcd psi(disc.size());
      for (std::size_t x = 0; x < disc.size(); ++x) psi(x) = modes[i].vector(*disc.cells[x].vertex);
      basis.push_back({ModeKind::Block, "-", i, modes[i].lambda, std::move(psi), 0.0, 0});
    }
  }

  if (basis.size() != disc.size()) {
    throw Error(ErrorCode::IncompleteBasis, std::to_string(basis.size()) + " modes for " +
                                                std::to_string(disc.size()) + " cells");
  }

  parallel_for(basis.size(), parallelism,
               [&](std::size_t i) { basis[i].residual = verify_eigenpair(a, basis[i].psi, basis[i].lambda); });

  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return basis[x].lambda < basis[y].lambda; });
  std::size_t group = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && !near(basis[order[i - 1]].lambda, basis[order[i]].lambda)) ++group;
    basis[order[i]].multiplet = group;
  }
  return basis;
}

Eigen::MatrixXcd gram_matrix(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights) {
  Eigen::MatrixXcd psi(weights.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) psi.col(i) = basis[i].psi;
  return psi.adjoint() * weights.asDiagonal() * psi;
}

Eigen::MatrixXcd projector_sum(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights) {
  Eigen::MatrixXcd psi(weights.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) psi.col(i) = basis[i].psi;
  return psi * psi.adjoint() * weights.asDiagonal();
}

void write_spectrum(std::ostream& out, const std::vector<EigenPair>& basis) {
  char lambda[40];
  char residual[40];
  out << "kind\tsupport\tindex\tlambda\tresidual\tmultiplet\n";
  for (const auto& e : basis) {
    std::snprintf(lambda, sizeof lambda, "%.17g", e.lambda);
    std::snprintf(residual, sizeof residual, "%.17g", e.residual);
    out << to_string(e.kind) << '\t' << e.support << '\t' << e.index << '\t' << lambda << '\t'
        << residual << '\t' << e.multiplet << '\n';
  }
}

}  // namespace ultradiff
