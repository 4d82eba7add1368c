#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultradiff/operators.hpp"
#include "ultradiff/spectra.hpp"

namespace ultradiff {

/// exp(tA) from the eigendecomposition of W^{1/2} A W^{-1/2}, computed once.
class SpectralSemigroup {
public:
  explicit SpectralSemigroup(const GeneratorMatrix& a);

  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  Eigen::MatrixXd matrix(double t) const;
  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const;

private:
  Eigen::VectorXd lambda_;
  Eigen::VectorXd root_;  // sqrt of the cell weights
  Eigen::MatrixXd q_;
};

enum class SemigroupMethod { Spectral, Pade };

struct SemigroupMatrix {
  double t = 0.0;
  Eigen::MatrixXd matrix;
};

/// Spectral by default; Pade is scaling and squaring on A itself and is used
/// whenever some cell weight is not positive. Throws NegativeTime.
SemigroupMatrix semigroup(const GeneratorMatrix& a, double t,
                          SemigroupMethod method = SemigroupMethod::Spectral);

struct HeatKernelTable {
  double t = 0.0;
  Eigen::MatrixXd p;          // p(t, x, y)
  double max_imaginary = 0.0; // largest discarded imaginary part
};

/// p(t,x,y) = sum e^{lambda t} psi(x) conj(psi(y)). Throws IncompleteBasis
/// unless the basis is square.
HeatKernelTable heat_kernel(const std::vector<EigenPair>& basis, double t);

/// T(t)(x, y) = p(t, x, y) w(y).
Eigen::MatrixXd transition_matrix(const HeatKernelTable& kernel, const Eigen::VectorXd& weights);

/// u(t) = sum <psi, u0> e^{lambda t} psi, real part.
Eigen::VectorXd solve_cauchy(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights,
                             const Eigen::VectorXd& u0, double t);

/// 0, 64 log-spaced points in (0, tau), tau.
std::vector<double> time_grid(double tau);

struct BoundConstant {
  std::size_t w = 0;
  std::size_t v = 0;
  double value = 0.0;
};

struct BoundReport {
  std::string kind;
  double t = 0.0;                  // time of the smallest slack
  double measured = 0.0;
  double bound = 0.0;              // certified right-hand side at t
  double statement_bound = 0.0;    // the variant without the factor 2 on the constant sum
  double rate = 0.0;               // bound / (t |u|_inf), independent of t
  std::vector<BoundConstant> constants;
  std::vector<double> volumes;     // Vol(U_v)
  double filler_volume = 0.0;
  double max_filler_rate = 0.0;
  double worst_statement_slack = 0.0;

  double slack() const { return bound - measured; }
};

inline constexpr double bound_tolerance = 1e-9;

/**
 * Compares the Haar semigroups on Z_l and Z at level-n cells for every t of
 * time_grid(t_max), u extended by 0 to the filler. The certified constant is
 *   2 sum C_{w,v} Vol(U_v) + Vol(Z_l \ Z) max k^l(x in Z, y in filler),
 * C_{w,v} = alpha |dist_p - s| / min(dist_p, s)^{alpha+1} for distinct
 * vertices in one new leaf (the exact rate difference where s = 0).
 */
BoundReport truncation_bound(const KernelSpec& spec, const Dendrogram& dendrogram,
                             const DiscAssignment& assign, std::size_t ell, std::size_t n,
                             double t_max, const Eigen::VectorXd& u);

/// Throws BoundViolated when the slack is below -bound_tolerance.
BoundReport certify_truncation(const KernelSpec& spec, const Dendrogram& dendrogram,
                               const DiscAssignment& assign, std::size_t ell, std::size_t n,
                               double t_max, const Eigen::VectorXd& u);

/**
 * |T_a(t) - T_b(t)|_inf against 2t sum_{w != v} C~_{w,v} Vol(U_v), with
 * C~ = alpha |s_a - s_b| / min(s_a, s_b)^{alpha+1} (exact rate difference
 * when one source vanishes). Both kernels share alpha.
 */
BoundReport kernel_swap_bound(const KernelSpec& a, const KernelSpec& b, const DiscAssignment& assign,
                              const Discretization& disc, double t,
                              MeasureKind measure = MeasureKind::Haar);

BoundReport certify_kernel_swap(const KernelSpec& a, const KernelSpec& b,
                                const DiscAssignment& assign, const Discretization& disc, double t,
                                MeasureKind measure = MeasureKind::Haar);

void write_bound_report(std::ostream& out, const BoundReport& report);

enum class Projector { PointEvaluation, Averaging };

struct ConvergenceRow {
  std::size_t n = 0;
  double gap = 0.0;             // sup over the time grid
  double gap_at_zero = 0.0;
  double projection_gap = 0.0;  // |u0 - E_n Q_n u0|_inf, Q_n the measure average
  double tail_norm = 0.0;       // sup norm of the Kozyrev components of u0 on balls of level >= n
};

struct ConvergenceReport {
  std::size_t reference_level = 0;
  double tau = 0.0;
  std::vector<ConvergenceRow> rows;

  /// Non-increasing within `slack`.
  bool monotone(double slack = 1e-12) const;
};

struct ConvergenceOptions {
  Projector projector = Projector::PointEvaluation;
  bool tail = false;
  std::size_t parallelism = 1;
};

/**
 * u0 is given on the level-N discretization `fine`. For each n: P_n (value
 * at the cell representative, the all-zero extension), evolve with the
 * level-n generator, embed with E_n and compare to the level-N solution.
 */
ConvergenceReport convergence_study(const KernelSpec& spec, const DiscAssignment& assign,
                                    const Dendrogram& dendrogram, const TreeMeasure& nu,
                                    MeasureKind measure, const Eigen::VectorXd& u0,
                                    std::size_t reference_level, const std::vector<std::size_t>& levels,
                                    double tau, const ConvergenceOptions& options = {});

/**
 * u0(x) = sum_{j=first}^{support-1} 4^{first-j} h_j(x), h_j a random function
 * of the first j+1 digits that vanishes when digit j is 0 and otherwise has
 * modulus in [1/2, 1]. Locally constant at level `support`.
 */
Eigen::VectorXd continuous_like_initial(const Discretization& fine, std::size_t first,
                                        std::size_t support, std::uint64_t seed);

void write_convergence(std::ostream& out, const ConvergenceReport& report);

}  // namespace ultradiff
