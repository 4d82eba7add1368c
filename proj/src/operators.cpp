#include "ultradiff/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ultradiff/error.hpp"

namespace ultradiff {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidInput, "alpha must be >= 1");
  }
}

double vladimirov_rate(std::uint32_t p, std::size_t common, double alpha) {
  return std::pow(static_cast<double>(p), static_cast<double>(common) * alpha);
}

void check_size(std::size_t cells) {
  if (cells > max_cells) {
    throw Error(ErrorCode::TooLarge, std::to_string(cells) + " cells exceed the dense limit of " +
                                         std::to_string(max_cells));
  }
}

}  // namespace

const char* to_string(Bullet bullet) {
  switch (bullet) {
    case Bullet::Adjacency: return "adjacency";
    case Bullet::GraphDistance: return "graphdist";
    case Bullet::Ultrametric: return "ultrametric";
  }
  return "?";
}

const char* to_string(MeasureKind measure) {
  return measure == MeasureKind::Haar ? "haar" : "nu";
}

Bullet parse_bullet(const std::string& name) {
  if (name == "adjacency") return Bullet::Adjacency;
  if (name == "graphdist") return Bullet::GraphDistance;
  if (name == "ultrametric") return Bullet::Ultrametric;
  throw Error(ErrorCode::ParseError, "unknown kernel '" + name + "'");
}

MeasureKind parse_measure(const std::string& name) {
  if (name == "haar") return MeasureKind::Haar;
  if (name == "nu") return MeasureKind::Nu;
  throw Error(ErrorCode::ParseError, "unknown measure '" + name + "'");
}

double KernelSpec::rate(std::size_t v, std::size_t w) const {
  if (v == w) return 0.0;
  const double s = source(v, w);
  if (bullet == Bullet::Adjacency && s == 0.0) return 0.0;
  return std::pow(s, -alpha);
}

KernelSpec KernelSpec::adjacency(const WeightedGraph& graph, double alpha) {
  check_alpha(alpha);
  const auto n = static_cast<Eigen::Index>(graph.vertices.size());
  KernelSpec spec{Bullet::Adjacency, alpha, Eigen::MatrixXd::Zero(n, n)};
  for (const auto& e : graph.edges) {
    if (!(e.weight > 0.0)) throw Error(ErrorCode::InvalidInput, "adjacency weights must be positive");
    auto& s = spec.source(e.u, e.v);
    s = (s == 0.0) ? e.weight : std::min(s, e.weight);
    spec.source(e.v, e.u) = s;
  }
  return spec;
}

KernelSpec KernelSpec::graph_distance(const DistanceMatrix& d, double alpha) {
  check_alpha(alpha);
  return {Bullet::GraphDistance, alpha, d.entries};
}

KernelSpec KernelSpec::ultrametric(const UltrametricMatrix& delta, double alpha) {
  check_alpha(alpha);
  return {Bullet::Ultrametric, alpha, delta.entries};
}

double kernel_value(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& x,
                    const PAdicCell& y) {
  if (x.p != assign.p || y.p != assign.p) {
    throw Error(ErrorCode::PrimeMismatch, "cell prime differs from the embedding prime");
  }
  auto vx = assign.vertex_of(x);
  auto vy = assign.vertex_of(y);
  if (!vx || !vy) throw Error(ErrorCode::CellOutsideZ, "cell " + (vx ? y : x).to_string() + " is not in Z");
  if (x == y) return 0.0;
  if (*vx == *vy) return vladimirov_rate(assign.p, common_prefix(x, y), spec.alpha);
  return spec.rate(*vx, *vy);
}

Eigen::VectorXcd GeneratorMatrix::apply(const Eigen::VectorXcd& u) const {
  const auto n = a.rows();
  if (u.size() != n) throw Error(ErrorCode::DimensionMismatch, "vector length differs from matrix");
  Eigen::VectorXcd out(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    std::complex<double> sum = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      if (y != x) sum += a(x, y) * (u(y) - u(x));
    }
    out(x) = sum;
  }
  return out;
}

Eigen::VectorXd GeneratorMatrix::apply(const Eigen::VectorXd& u) const {
  return apply(Eigen::VectorXcd(u.cast<std::complex<double>>())).real();
}

GeneratorMatrix assemble_generator(Eigen::MatrixXd rates, Eigen::VectorXd weights) {
  const auto n = rates.rows();
  GeneratorMatrix g;
  g.a.resize(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      if (y == x) continue;
      g.a(x, y) = rates(x, y) * weights(y);
      row += g.a(x, y);
    }
    g.a(x, x) = -row;
  }
  g.rates = std::move(rates);
  g.weights = std::move(weights);
  return g;
}

Eigen::VectorXd cell_weights(const Discretization& disc, MeasureKind measure) {
  Eigen::VectorXd w(disc.size());
  for (std::size_t i = 0; i < disc.size(); ++i) {
    w(i) = measure == MeasureKind::Haar ? disc.cells[i].haar : disc.cells[i].nu;
  }
  return w;
}

GeneratorMatrix generator(const KernelSpec& spec, const DiscAssignment& assign,
                          const Discretization& disc, MeasureKind measure) {
  check_size(disc.size());
  const auto n = static_cast<Eigen::Index>(disc.size());
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ci = disc.cells[i];
    if (!ci.vertex) throw Error(ErrorCode::CellOutsideZ, "cell " + ci.cell.to_string() + " is not in Z");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& cj = disc.cells[j];
      if (!cj.vertex) throw Error(ErrorCode::CellOutsideZ, "cell " + cj.cell.to_string() + " is not in Z");
      double k = (*ci.vertex == *cj.vertex)
                     ? vladimirov_rate(assign.p, common_prefix(ci.cell, cj.cell), spec.alpha)
                     : spec.rate(*ci.vertex, *cj.vertex);
      rates(i, j) = rates(j, i) = k;
    }
  }
  auto g = assemble_generator(std::move(rates), cell_weights(disc, measure));
  g.p = assign.p;
  g.level = disc.level;
  g.bullet = spec.bullet;
  g.alpha = spec.alpha;
  g.measure = measure;
  return g;
}

double degree(const KernelSpec& spec, const DiscAssignment& assign, const Discretization& disc,
              MeasureKind measure, std::size_t x) {
  const auto& cx = disc.cells.at(x);
  double sum = 0.0;
  for (std::size_t y = 0; y < disc.size(); ++y) {
    if (y == x) continue;
    const auto& cy = disc.cells[y];
    sum += kernel_value(spec, assign, cx.cell, cy.cell) *
           (measure == MeasureKind::Haar ? cy.haar : cy.nu);
  }
  return sum;
}

TruncatedDomain truncated_domain(const Dendrogram& dendrogram, const DiscAssignment& assign,
                                 const KernelSpec& spec, std::size_t ell, std::size_t n) {
  if (ell == 0 || ell > dendrogram.max_level()) {
    throw Error(ErrorCode::InvalidLevel, "truncation level " + std::to_string(ell) +
                                             " outside 1.." + std::to_string(dendrogram.max_level()));
  }
  if (n <= assign.m) {
    throw Error(ErrorCode::LevelTooCoarse, "level " + std::to_string(n) +
                                               " does not refine vertex discs of level " +
                                               std::to_string(assign.m));
  }
  TruncatedDomain domain;
  domain.ell = ell;
  // New leaves in depth-first order; children are label ordered, so this is digit order.
  std::vector<std::size_t> stack{dendrogram.root()};
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    const auto& node = dendrogram.node(id);
    if (node.level == ell || node.is_leaf()) {
      domain.nodes.push_back(id);
      continue;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }

  const double haar = inverse_power(assign.p, n);
  domain.disc.p = assign.p;
  domain.disc.level = n;
  for (std::size_t k = 0; k < domain.nodes.size(); ++k) {
    for (auto& cell : cells_below(assign.node_balls[domain.nodes[k]], n)) {
      auto vertex = assign.vertex_of(cell);
      if (!vertex) domain.filler_volume += haar;
      domain.disc.cells.push_back({std::move(cell), vertex, k, haar, 0.0});
    }
  }
  check_size(domain.disc.size());

  const auto count = static_cast<Eigen::Index>(domain.nodes.size());
  domain.node_kernel = {spec.bullet, spec.alpha, Eigen::MatrixXd::Zero(count, count)};
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index b = 0; b < count; ++b) {
      if (a == b) continue;
      double best = 0.0;
      for (auto v : dendrogram.node(domain.nodes[a]).members) {
        for (auto w : dendrogram.node(domain.nodes[b]).members) {
          const double s = spec.source(v, w);
          if (s > 0.0 && (best == 0.0 || s < best)) best = s;
        }
      }
      domain.node_kernel.source(a, b) = best;
    }
  }
  return domain;
}

double truncated_kernel_value(const TruncatedDomain& domain, const KernelSpec& spec,
                              std::size_t i, std::size_t j) {
  if (i == j) return 0.0;
  const auto& ci = domain.disc.cells.at(i);
  const auto& cj = domain.disc.cells.at(j);
  if (ci.region == cj.region) {
    return vladimirov_rate(domain.disc.p, common_prefix(ci.cell, cj.cell), spec.alpha);
  }
  if (ci.vertex && cj.vertex) return spec.rate(*ci.vertex, *cj.vertex);
  return domain.node_kernel.rate(ci.region, cj.region);
}

GeneratorMatrix truncated_generator(const TruncatedDomain& domain, const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(domain.disc.size());
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      rates(i, j) = rates(j, i) = truncated_kernel_value(domain, spec, i, j);
    }
  }
  auto g = assemble_generator(std::move(rates), cell_weights(domain.disc, MeasureKind::Haar));
  g.p = domain.disc.p;
  g.level = domain.disc.level;
  g.bullet = spec.bullet;
  g.alpha = spec.alpha;
  g.measure = MeasureKind::Haar;
  return g;
}

void write_matrix(std::ostream& out, const GeneratorMatrix& a, const Discretization& disc) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", a.alpha);
  out << "# p=" << a.p << " n=" << a.level << " bullet=" << to_string(a.bullet)
      << " alpha=" << buffer << " measure=" << to_string(a.measure) << " cells=" << a.size()
      << '\n';
  out << "# cells";
  for (const auto& c : disc.cells) out << ' ' << c.cell.to_string();
  out << '\n';
  for (Eigen::Index x = 0; x < a.a.rows(); ++x) {
    for (Eigen::Index y = 0; y < a.a.cols(); ++y) {
      std::snprintf(buffer, sizeof buffer, "%.17g", a.a(x, y));
      out << (y ? " " : "") << buffer;
    }
    out << '\n';
  }
}

}  // namespace ultradiff
