#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultradiff/padic.hpp"
#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

enum class Bullet { Adjacency, GraphDistance, Ultrametric };
enum class MeasureKind { Haar, Nu };

const char* to_string(Bullet bullet);
const char* to_string(MeasureKind measure);
Bullet parse_bullet(const std::string& name);
MeasureKind parse_measure(const std::string& name);

/// Largest generator this library assembles densely.
inline constexpr std::size_t max_cells = 10000;

/**
 * Vertex-level interaction kernel. `source` holds kappa (0 off the edge set),
 * d_E or delta; the rate between distinct vertices is source^{-alpha}, and 0
 * for non-adjacent vertices under the adjacency kernel.
 */
struct KernelSpec {
  Bullet bullet = Bullet::Ultrametric;
  double alpha = 1.0;
  Eigen::MatrixXd source;

  std::size_t size() const { return static_cast<std::size_t>(source.rows()); }
  double rate(std::size_t v, std::size_t w) const;

  static KernelSpec adjacency(const WeightedGraph& graph, double alpha);
  static KernelSpec graph_distance(const DistanceMatrix& d, double alpha);
  static KernelSpec ultrametric(const UltrametricMatrix& delta, double alpha);
};

/// k_p(x, y) between two distinct cells of Z. Throws CellOutsideZ.
double kernel_value(const KernelSpec& spec, const DiscAssignment& assign, const PAdicCell& x,
                    const PAdicCell& y);

/**
 * Finite generator on level-n cells: a(x, y) = k(x, y) * weight(y) off the
 * diagonal and minus the row sum on it. Exact for functions constant on
 * level-n cells.
 */
struct GeneratorMatrix {
  std::uint32_t p = 2;
  std::size_t level = 0;
  Bullet bullet = Bullet::Ultrametric;
  double alpha = 1.0;
  MeasureKind measure = MeasureKind::Haar;
  Eigen::VectorXd weights;  // measure of every cell
  Eigen::MatrixXd rates;    // symmetric kernel values, zero diagonal
  Eigen::MatrixXd a;

  std::size_t size() const { return static_cast<std::size_t>(a.rows()); }
  double degree(std::size_t x) const { return -a(x, x); }
  /// A u evaluated as sum_y a(x,y) (u(y) - u(x)); no cancellation of large rates.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
};

/// Assembles a generator from symmetric rates and cell weights.
GeneratorMatrix assemble_generator(Eigen::MatrixXd rates, Eigen::VectorXd weights);

Eigen::VectorXd cell_weights(const Discretization& disc, MeasureKind measure);

GeneratorMatrix generator(const KernelSpec& spec, const DiscAssignment& assign,
                          const Discretization& disc, MeasureKind measure);

/// Off-diagonal row sum of the generator at cell x.
double degree(const KernelSpec& spec, const DiscAssignment& assign, const Discretization& disc,
              MeasureKind measure, std::size_t x);

/**
 * Z_l: the union of the balls of the dendrogram cut at level l. Its new
 * leaves are the level-l nodes together with shallower leaves. Cells of the
 * same new leaf interact with the Vladimirov rate; cells of Z in different new
 * leaves keep their vertex rate; filler cells (Z_l minus Z) use node_kernel,
 * whose source between two new leaves is the smallest positive source over
 * their member pairs.
 */
struct TruncatedDomain {
  std::size_t ell = 0;
  std::vector<std::size_t> nodes;  // dendrogram ids of the new leaves
  Discretization disc;             // region = index into `nodes`
  KernelSpec node_kernel;
  double filler_volume = 0.0;      // Haar volume of Z_l minus Z
};

/// Throws InvalidLevel unless 0 < ell <= max level, LevelTooCoarse unless n > m.
TruncatedDomain truncated_domain(const Dendrogram& dendrogram, const DiscAssignment& assign,
                                 const KernelSpec& spec, std::size_t ell, std::size_t n);

double truncated_kernel_value(const TruncatedDomain& domain, const KernelSpec& spec,
                              std::size_t i, std::size_t j);

/// Haar-measure generator on Z_l.
GeneratorMatrix truncated_generator(const TruncatedDomain& domain, const KernelSpec& spec);

/// Text export: one header line, one line of cell digits, then the rows.
void write_matrix(std::ostream& out, const GeneratorMatrix& a, const Discretization& disc);

}  // namespace ultradiff
