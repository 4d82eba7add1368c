#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultradiff/operators.hpp"
#include "ultradiff/padic.hpp"
#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

enum class ModeKind { Kozyrev, Ultrametric, Block, Constant };

const char* to_string(ModeKind kind);

struct EigenPair {
  ModeKind kind = ModeKind::Block;
  std::string support;        // ball digits, node id or "-"
  std::size_t index = 0;      // j, k or block mode number
  double lambda = 0.0;
  Eigen::VectorXcd psi;
  double residual = 0.0;
  std::size_t multiplet = 0;  // modes sharing a numerically degenerate eigenvalue share this id
};

/// Relative residual |A psi - lambda psi|_inf / max(1, |lambda|).
double verify_eigenpair(const GeneratorMatrix& a, const Eigen::VectorXcd& psi, double lambda);

/**
 * Kozyrev wavelet of the ball B with character j: on the child of B whose
 * next digit is a, |B|^{-1/2} exp(2 pi i j a / p). Normalized in the chosen
 * measure (the nu density is constant on each vertex disc).
 */
Eigen::VectorXcd kozyrev_wavelet(const DiscAssignment& assign, const Discretization& disc,
                                 const PAdicCell& ball, std::size_t j,
                                 MeasureKind measure = MeasureKind::Haar);

/// Vertex of the disc holding B. Throws BallOutsideZ.
std::size_t vertex_of_ball(const DiscAssignment& assign, const PAdicCell& ball);

/**
 * Contribution of the vertex disc U_v for a wavelet on B of radius p^{-d}:
 *   -int_{U_v \ B} |x - y|^{-alpha} dy - p^{d(alpha-1)}
 * with Haar measure normalized to mu(Z_p) = 1, i.e.
 *   -(1 - 1/p) sum_{k=m}^{d-1} p^{k(alpha-1)} - p^{d(alpha-1)}.
 */
double kozyrev_local_eigenvalue(std::uint32_t p, double alpha, std::size_t m, std::size_t d);

/// Measure of every vertex disc: p^{-m} under Haar, nu(leaf) under nu.
Eigen::VectorXd vertex_measures(const DiscAssignment& assign, const Dendrogram& dendrogram,
                                const TreeMeasure& nu, MeasureKind measure);

/**
 * Eigenvalue of the generator on psi_{B,j}, for any j. With disc measures
 * m_w and density phi_v = m_v / p^{-m} on U_v:
 *   phi_v * local - sum_{w != v} k(v,w) m_w.
 */
double kozyrev_eigenvalue(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& ball,
                          const Eigen::VectorXd& disc_measures);
/// Haar measure.
double kozyrev_eigenvalue(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& ball);

/// The alternative closed form 1 - p^{d(1+alpha)}(p^{-m(1+alpha)} + 1) - sum k(v,w) mu(U_w).
/// Kept for comparison; it does not match the generator.
double kozyrev_eigenvalue_printed(const KernelSpec& spec, const DiscAssignment& assign,
                                  const PAdicCell& ball);

/**
 * Haar-like wavelet of a non-leaf node with character k of Z/cZ; children
 * are indexed by smallest member label. Normalized in nu.
 */
Eigen::VectorXcd ultrametric_wavelet(const Dendrogram& dendrogram, const TreeMeasure& nu,
                                     const Discretization& disc, std::size_t node, std::size_t k);

/**
 * Eigenvalue of the ultrametric-kernel nu-generator on wavelets of `node`:
 *   -r(n)^{-alpha} nu(n) - sum over ancestors a -> a' of r(a')^{-alpha} (nu(a') - nu(a)),
 * r being the node radius. The first term is -r^{-alpha} c nu(child).
 */
double ultrametric_eigenvalue(const Dendrogram& dendrogram, const TreeMeasure& nu, std::size_t node,
                              double alpha);

/// -r^{-alpha} c nu(n \ m) without the exterior term; overcounts by c - 1.
double ultrametric_eigenvalue_printed(const Dendrogram& dendrogram, const TreeMeasure& nu,
                                      std::size_t node, double alpha);

struct BlockMode {
  double lambda = 0.0;
  Eigen::VectorXd vector;  // per vertex, orthonormal in the vertex weights
  std::size_t multiplet = 0;
};

/// Modes of L[v][w] = k(v,w) weight(w), diagonal minus the row sum.
std::vector<BlockMode> laplacian_block_modes(const KernelSpec& spec,
                                             const Eigen::VectorXd& vertex_weights);

/**
 * Orthonormal eigenbasis of the level-n space in the generator's measure.
 * Haar: Kozyrev wavelets plus block modes. Nu: Kozyrev wavelets plus, for the
 * ultrametric kernel, the constant and the ultrametric wavelets, otherwise
 * block modes. Throws IncompleteBasis on a count mismatch.
 */
std::vector<EigenPair> full_basis(const KernelSpec& spec, const DiscAssignment& assign,
                                  const Dendrogram& dendrogram, const TreeMeasure& nu,
                                  const Discretization& disc, const GeneratorMatrix& a,
                                  std::size_t parallelism = 1);

/// G[i][j] = sum_x conj(psi_i(x)) psi_j(x) w(x).
Eigen::MatrixXcd gram_matrix(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights);

/// sum_i psi_i(x) conj(psi_i(y)) w(y); the identity for a complete basis.
Eigen::MatrixXcd projector_sum(const std::vector<EigenPair>& basis, const Eigen::VectorXd& weights);

/// Tab separated: kind, support, index, lambda, residual, multiplet.
void write_spectrum(std::ostream& out, const std::vector<EigenPair>& basis);

}  // namespace ultradiff
