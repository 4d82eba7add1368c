#include "ultradiff/heat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ultradiff/error.hpp"
#include "ultradiff/parallel.hpp"

namespace ultradiff {

namespace {

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::NegativeTime, "time must be finite and >= 0");
  }
}

std::string number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::map<PAdicCell, std::size_t> index_cells(const Discretization& disc) {
  std::map<PAdicCell, std::size_t> index;
  for (std::size_t i = 0; i < disc.size(); ++i) index.emplace(disc.cells[i].cell, i);
  return index;
}

/// Mean value bound for |s^{-alpha} - r^{-alpha}|; the plain difference if a source is missing.
double rate_gap_constant(double s, double r, double rate_s, double rate_r, double alpha) {
  if (s <= 0.0 || r <= 0.0) return std::abs(rate_s - rate_r);
  return alpha * std::abs(s - r) / std::pow(std::min(s, r), alpha + 1.0);
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SpectralSemigroup::SpectralSemigroup(const GeneratorMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (a.weights.size() != n || (n > 0 && a.weights.minCoeff() <= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "spectral semigroup needs positive cell weights");
  }
  root_ = a.weights.cwiseSqrt();
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      s(x, y) = x == y ? a.a(x, x) : root_(x) * a.rates(x, y) * root_(y);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidInput, "symmetric eigensolve did not converge");
  }
  lambda_ = solver.eigenvalues();
  q_ = solver.eigenvectors();
}

Eigen::MatrixXd SpectralSemigroup::matrix(double t) const {
  check_time(t);
  if (t == 0.0) return Eigen::MatrixXd::Identity(root_.size(), root_.size());
  const Eigen::VectorXd decay = (t * lambda_).array().exp();
  Eigen::MatrixXd sym = q_ * decay.asDiagonal() * q_.transpose();
  return root_.cwiseInverse().asDiagonal() * sym * root_.asDiagonal();
}

Eigen::VectorXd SpectralSemigroup::apply(double t, const Eigen::VectorXd& u) const {
  check_time(t);
  if (u.size() != root_.size()) throw Error(ErrorCode::DimensionMismatch, "vector length differs from semigroup");
  if (t == 0.0) return u;
  const Eigen::VectorXd decay = (t * lambda_).array().exp();
  Eigen::VectorXd c = q_.transpose() * root_.cwiseProduct(u);
  return (q_ * decay.cwiseProduct(c)).cwiseQuotient(root_);
}

SemigroupMatrix semigroup(const GeneratorMatrix& a, double t, SemigroupMethod method) {
  check_time(t);
  if (method == SemigroupMethod::Spectral && a.weights.size() > 0 && a.weights.minCoeff() > 0.0) {
    return {t, SpectralSemigroup(a).matrix(t)};
  }
  Eigen::MatrixXd scaled = t * a.a;
  return {t, scaled.exp()};
}

HeatKernelTable heat_kernel(const std::vector<EigenPair>& basis, double t) {
  check_time(t);
  const std::size_t n = basis.empty() ? 0 : static_cast<std::size_t>(basis.front().psi.size());
  if (basis.size() != n) {
    throw Error(ErrorCode::IncompleteBasis, std::to_string(basis.size()) + " modes for " +
                                                std::to_string(n) + " cells");
  }
  Eigen::MatrixXcd psi(n, n);
  Eigen::VectorXd decay(n);
  for (std::size_t i = 0; i < n; ++i) {
    psi.col(i) = basis[i].psi;
    decay(i) = std::exp(basis[i].lambda * t);
  }
  const Eigen::MatrixXcd p = psi * decay.asDiagonal() * psi.adjoint();
  return {t, p.real(), n ? p.imag().cwiseAbs().maxCoeff() : 0.0};
}

Eigen::MatrixXd transition_matrix(const HeatKernelTable& kernel, const Eigen::VectorXd& weights) {
  return kernel.p * weights.asDiagonal();
}

Eigen::VectorXd solve_cauchy(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights,
                             const Eigen::VectorXd& u0, double t) {
  check_time(t);
  if (basis.size() != static_cast<std::size_t>(u0.size())) {
    throw Error(ErrorCode::IncompleteBasis, std::to_string(basis.size()) + " modes for " +
                                                std::to_string(u0.size()) + " cells");
  }
  const Eigen::VectorXcd weighted = weights.cwiseProduct(u0).cast<std::complex<double>>();
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(u0.size());
  for (const auto& mode : basis) {
    const std::complex<double> c = mode.psi.dot(weighted);  // conjugates psi
    u += c * std::exp(mode.lambda * t) * mode.psi;
  }
  return u.real();
}

std::vector<double> time_grid(double tau) {
  check_time(tau);
  std::vector<double> grid{0.0};
  if (tau == 0.0) return grid;
  constexpr int points = 64;
  for (int i = 1; i <= points; ++i) {
    grid.push_back(tau * std::pow(10.0, -4.0 + 4.0 * i / (points + 1)));
  }
  grid.push_back(tau);
  return grid;
}

BoundReport truncation_bound(const KernelSpec& spec, const Dendrogram& dendrogram,
                             const DiscAssignment& assign, std::size_t ell, std::size_t n,
                             double t_max, const Eigen::VectorXd& u) {
  check_time(t_max);
  const auto domain = truncated_domain(dendrogram, assign, spec, ell, n);
  const auto nu = tree_measure(dendrogram);
  const auto disc = discretize(assign, dendrogram, nu, n);
  if (static_cast<std::size_t>(u.size()) != disc.size()) {
    throw Error(ErrorCode::DimensionMismatch, "u has " + std::to_string(u.size()) + " entries for " +
                                                  std::to_string(disc.size()) + " cells");
  }
  const auto full = generator(spec, assign, disc, MeasureKind::Haar);
  const auto truncated = truncated_generator(domain, spec);

  const auto index = index_cells(domain.disc);
  std::vector<std::size_t> to_truncated(disc.size());
  for (std::size_t i = 0; i < disc.size(); ++i) to_truncated[i] = index.at(disc.cells[i].cell);

  BoundReport report;
  report.kind = "truncation";
  report.filler_volume = domain.filler_volume;
  report.volumes.assign(assign.discs.size(), assign.disc_haar_volume());

  double constant_sum = 0.0;
  for (auto node : domain.nodes) {
    const auto& members = dendrogram.node(node).members;
    for (auto w : members) {
      for (auto v : members) {
        if (w == v) continue;
        const double dist = padic_distance(assign.discs[w], assign.discs[v]);
        const double value = rate_gap_constant(dist, spec.source(w, v), std::pow(dist, -spec.alpha),
                                               spec.rate(w, v), spec.alpha);
        report.constants.push_back({w, v, value});
        constant_sum += value * report.volumes[v];
      }
    }
  }
  for (std::size_t i = 0; i < domain.disc.size(); ++i) {
    if (!domain.disc.cells[i].vertex) continue;
    for (std::size_t j = 0; j < domain.disc.size(); ++j) {
      if (domain.disc.cells[j].vertex) continue;
      report.max_filler_rate = std::max(report.max_filler_rate, truncated_kernel_value(domain, spec, i, j));
    }
  }
  const double filler_term = report.filler_volume * report.max_filler_rate;
  report.rate = 2.0 * constant_sum + filler_term;
  const double statement_rate = constant_sum + filler_term;
  const double norm = sup_norm(u);

  Eigen::VectorXd extended = Eigen::VectorXd::Zero(domain.disc.size());
  for (std::size_t i = 0; i < disc.size(); ++i) extended(to_truncated[i]) = u(i);
  const SpectralSemigroup full_t(full);
  const SpectralSemigroup truncated_t(truncated);

  bool first = true;
  report.worst_statement_slack = 0.0;
  for (double t : time_grid(t_max)) {
    // Both semigroups are exactly the identity at t = 0.
    if (t == 0.0 && t_max > 0.0) continue;
    const Eigen::VectorXd a = full_t.apply(t, u);
    const Eigen::VectorXd b = truncated_t.apply(t, extended);
    double measured = 0.0;
    for (std::size_t i = 0; i < disc.size(); ++i) {
      measured = std::max(measured, std::abs(b(to_truncated[i]) - a(i)));
    }
    const double bound = t * norm * report.rate;
    const double statement = t * norm * statement_rate;
    if (first || bound - measured < report.slack()) {
      report.t = t;
      report.measured = measured;
      report.bound = bound;
      report.statement_bound = statement;
    }
    if (first || statement - measured < report.worst_statement_slack) {
      report.worst_statement_slack = statement - measured;
    }
    first = false;
  }
  return report;
}

BoundReport certify_truncation(const KernelSpec& spec, const Dendrogram& dendrogram,
                               const DiscAssignment& assign, std::size_t ell, std::size_t n,
                               double t_max, const Eigen::VectorXd& u) {
  auto report = truncation_bound(spec, dendrogram, assign, ell, n, t_max, u);
  if (report.slack() < -bound_tolerance) {
    throw Error(ErrorCode::BoundViolated, "truncation at level " + std::to_string(ell) + ", t=" +
                                              number(report.t) + ": measured " + number(report.measured) +
                                              " > bound " + number(report.bound));
  }
  return report;
}

BoundReport kernel_swap_bound(const KernelSpec& a, const KernelSpec& b, const DiscAssignment& assign,
                              const Discretization& disc, double t, MeasureKind measure) {
  check_time(t);
  if (a.alpha != b.alpha) throw Error(ErrorCode::InvalidInput, "kernels must share alpha");
  if (a.size() != b.size() || a.size() != assign.discs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel sizes differ");
  }
  const auto ga = generator(a, assign, disc, measure);
  const auto gb = generator(b, assign, disc, measure);

  BoundReport report;
  report.kind = "swap";
  report.t = t;
  report.volumes.assign(a.size(), 0.0);
  for (const auto& c : disc.cells) report.volumes[*c.vertex] += measure == MeasureKind::Haar ? c.haar : c.nu;

  double constant_sum = 0.0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (w == v) continue;
      const double value =
          rate_gap_constant(a.source(w, v), b.source(w, v), a.rate(w, v), b.rate(w, v), a.alpha);
      report.constants.push_back({w, v, value});
      constant_sum += value * report.volumes[v];
    }
  }
  report.rate = 2.0 * constant_sum;
  report.bound = t * report.rate;
  report.statement_bound = report.bound;
  const Eigen::MatrixXd diff = semigroup(ga, t).matrix - semigroup(gb, t).matrix;
  report.measured = diff.size() ? diff.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  report.worst_statement_slack = report.slack();
  return report;
}

BoundReport certify_kernel_swap(const KernelSpec& a, const KernelSpec& b,
                                const DiscAssignment& assign, const Discretization& disc, double t,
                                MeasureKind measure) {
  auto report = kernel_swap_bound(a, b, assign, disc, t, measure);
  if (report.slack() < -bound_tolerance) {
    throw Error(ErrorCode::BoundViolated, std::string("swap ") + to_string(a.bullet) + "/" +
                                              to_string(b.bullet) + " at t=" + number(t) + ": measured " +
                                              number(report.measured) + " > bound " + number(report.bound));
  }
  return report;
}

void write_bound_report(std::ostream& out, const BoundReport& report) {
  out << "kind\t" << report.kind << '\n'
      << "t\t" << number(report.t) << '\n'
      << "measured\t" << number(report.measured) << '\n'
      << "bound\t" << number(report.bound) << '\n'
      << "statement_bound\t" << number(report.statement_bound) << '\n'
      << "slack\t" << number(report.slack()) << '\n'
      << "filler_volume\t" << number(report.filler_volume) << '\n'
      << "max_filler_rate\t" << number(report.max_filler_rate) << '\n';
  for (std::size_t v = 0; v < report.volumes.size(); ++v) {
    out << "volume\t" << v << '\t' << number(report.volumes[v]) << '\n';
  }
  for (const auto& c : report.constants) {
    out << "constant\t" << c.w << '\t' << c.v << '\t' << number(c.value) << '\n';
  }
}

bool ConvergenceReport::monotone(double slack) const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].gap > rows[i - 1].gap + slack) return false;
  }
  return true;
}

ConvergenceReport convergence_study(const KernelSpec& spec, const DiscAssignment& assign,
                                    const Dendrogram& dendrogram, const TreeMeasure& nu,
                                    MeasureKind measure, const Eigen::VectorXd& u0,
                                    std::size_t reference_level, const std::vector<std::size_t>& levels,
                                    double tau, const ConvergenceOptions& options) {
  const auto fine = discretize(assign, dendrogram, nu, reference_level);
  if (static_cast<std::size_t>(u0.size()) != fine.size()) {
    throw Error(ErrorCode::DimensionMismatch, "u0 has " + std::to_string(u0.size()) + " entries for " +
                                                  std::to_string(fine.size()) + " cells");
  }
  for (auto n : levels) {
    if (n > reference_level) {
      throw Error(ErrorCode::InvalidLevel, "level " + std::to_string(n) + " exceeds the reference level");
    }
  }
  const auto grid = time_grid(tau);
  const Eigen::VectorXd fine_weights = cell_weights(fine, measure);
  const SpectralSemigroup reference(generator(spec, assign, fine, measure));
  std::vector<Eigen::VectorXd> exact(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) exact[k] = reference.apply(grid[k], u0);
  const auto fine_index = index_cells(fine);

  ConvergenceReport report;
  report.reference_level = reference_level;
  report.tau = tau;
  report.rows.resize(levels.size());

  parallel_for(levels.size(), options.parallelism, [&](std::size_t r) {
    const std::size_t n = levels[r];
    const auto coarse = discretize(assign, dendrogram, nu, n);
    const auto coarse_index = index_cells(coarse);
    std::vector<std::size_t> parent(fine.size());
    for (std::size_t x = 0; x < fine.size(); ++x) parent[x] = coarse_index.at(fine.cells[x].cell.prefix(n));

    Eigen::VectorXd average = Eigen::VectorXd::Zero(coarse.size());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(coarse.size());
    for (std::size_t x = 0; x < fine.size(); ++x) {
      average(parent[x]) += fine_weights(x) * u0(x);
      mass(parent[x]) += fine_weights(x);
    }
    average = average.cwiseQuotient(mass);

    Eigen::VectorXd projected(coarse.size());
    if (options.projector == Projector::Averaging) {
      projected = average;
    } else {
      for (std::size_t c = 0; c < coarse.size(); ++c) {
        PAdicCell representative = coarse.cells[c].cell;
        representative.digits.resize(reference_level, 0);
        projected(c) = u0(fine_index.at(representative));
      }
    }

    ConvergenceRow row;
    row.n = n;
    const SpectralSemigroup evolution(generator(spec, assign, coarse, measure));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Eigen::VectorXd un = evolution.apply(grid[k], projected);
      double gap = 0.0;
      for (std::size_t x = 0; x < fine.size(); ++x) gap = std::max(gap, std::abs(un(parent[x]) - exact[k](x)));
      if (k == 0) row.gap_at_zero = gap;
      row.gap = std::max(row.gap, gap);
    }
    for (std::size_t x = 0; x < fine.size(); ++x) {
      row.projection_gap = std::max(row.projection_gap, std::abs(u0(x) - average(parent[x])));
    }

    if (options.tail) {
      Eigen::VectorXcd tail = Eigen::VectorXcd::Zero(fine.size());
      const Eigen::VectorXcd weighted = fine_weights.cwiseProduct(u0).cast<std::complex<double>>();
      for (const auto& disc : assign.discs) {
        for (std::size_t d = std::max(n, assign.m); d < reference_level; ++d) {
          for (const auto& ball : cells_below(disc, d)) {
            for (std::size_t j = 1; j < assign.p; ++j) {
              const auto psi = kozyrev_wavelet(assign, fine, ball, j, measure);
              tail += psi.dot(weighted) * psi;
            }
          }
        }
      }
      row.tail_norm = tail.cwiseAbs().maxCoeff();
    }
    report.rows[r] = row;
  });
  return report;
}

Eigen::VectorXd continuous_like_initial(const Discretization& fine, std::size_t first,
                                        std::size_t support, std::uint64_t seed) {
  if (support > fine.level) {
    throw Error(ErrorCode::InvalidLevel, "support level exceeds the discretization level");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> modulus(0.5, 1.0);
  std::bernoulli_distribution sign(0.5);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(fine.size());
  double amplitude = 1.0;
  for (std::size_t j = first; j < support; ++j, amplitude /= 4.0) {
    std::map<PAdicCell, double> h;
    for (std::size_t x = 0; x < fine.size(); ++x) {
      const auto& cell = fine.cells[x].cell;
      if (cell.digits[j] == 0) continue;
      auto key = cell.prefix(j + 1);
      auto it = h.find(key);
      if (it == h.end()) {
        const double value = modulus(rng);
        it = h.emplace(std::move(key), sign(rng) ? value : -value).first;
      }
      u(x) += amplitude * it->second;
    }
  }
  return u;
}

void write_convergence(std::ostream& out, const ConvergenceReport& report) {
  out << "n\tgap\tgap_at_zero\tprojection_gap\ttail_norm\n";
  for (const auto& r : report.rows) {
    out << r.n << '\t' << number(r.gap) << '\t' << number(r.gap_at_zero) << '\t'
        << number(r.projection_gap) << '\t' << number(r.tail_norm) << '\n';
  }
}

}  // namespace ultradiff
