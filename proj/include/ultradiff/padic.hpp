#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ultradiff/ultraindex.hpp"

namespace ultradiff {

/**
 * The p-adic ball a + p^n Z_p, written by its first n base-p digits
 * (least significant first). The empty digit string is Z_p itself.
 */
struct PAdicCell {
  std::uint32_t p = 2;
  std::vector<std::uint32_t> digits;

  std::size_t level() const { return digits.size(); }
  /// Ball inclusion: `finer` lies inside this ball.
  bool contains(const PAdicCell& finer) const;
  /// The same ball refined by one more digit.
  PAdicCell child(std::uint32_t digit) const;
  /// First `n` digits.
  PAdicCell prefix(std::size_t n) const;
  std::string to_string() const;

  friend bool operator==(const PAdicCell&, const PAdicCell&) = default;
  friend auto operator<=>(const PAdicCell&, const PAdicCell&) = default;
};

std::size_t common_prefix(const PAdicCell& x, const PAdicCell& y);

/// |x - y|_p for points of two same-level cells: p^{-j} with j the common
/// prefix length, 0 for equal cells. Throws PrimeMismatch.
double padic_distance(const PAdicCell& x, const PAdicCell& y);

/// p^{-k} as a double.
double inverse_power(std::uint32_t p, std::size_t k);

/**
 * Embedding of a dendrogram into the tree of p-adic balls.
 *
 * Every node sits at the p-adic level given by the rank of its radius among
 * the distinct positive radii (root at 0). Children take distinct digits at
 * their parent's level, so two leaves diverge exactly at the level of their
 * lowest common ancestor, and rho_table[j] = delta for common prefix j.
 * Leaf discs all live at level m = number of distinct positive radii.
 */
struct DiscAssignment {
  std::uint32_t p = 2;
  std::size_t m = 0;
  std::vector<PAdicCell> discs;        // per vertex, level m
  std::vector<PAdicCell> node_balls;   // per dendrogram node
  std::vector<double> rho_table;       // size m, strictly decreasing in j

  /// rho at p-adic distance p^{-j}; j < m.
  double rho(std::size_t j) const { return rho_table.at(j); }
  /// Vertex whose disc contains the cell, if any.
  std::optional<std::size_t> vertex_of(const PAdicCell& cell) const;
  double disc_haar_volume() const { return inverse_power(p, m); }
};

/// Smallest prime >= max(branching, min_prime). Leaves are padded with zero
/// digits down to level m.
DiscAssignment embed(const Dendrogram& dendrogram, std::uint32_t min_prime = 2);

/**
 * Tree measure: mass 1 at the root, split equally among children. Stored as
 * exact unit fractions 1/denominator.
 */
struct TreeMeasure {
  std::vector<std::uint64_t> denominators;  // per node

  double of_node(std::size_t node) const { return 1.0 / static_cast<double>(denominators.at(node)); }
};

TreeMeasure tree_measure(const Dendrogram& dendrogram);

struct DiscretizationCell {
  PAdicCell cell;
  std::optional<std::size_t> vertex;  // empty for cells outside Z (truncation filler)
  std::size_t region = 0;             // dendrogram node whose ball holds the cell
  double haar = 0.0;
  double nu = 0.0;
};

struct Discretization {
  std::uint32_t p = 2;
  std::size_t level = 0;
  std::vector<DiscretizationCell> cells;

  std::size_t size() const { return cells.size(); }
  /// Index of a cell with exactly these digits, if present.
  std::optional<std::size_t> find(const PAdicCell& cell) const;
  double haar_total() const;
  double nu_total() const;
};

/// All level-n cells of Z, vertex-major and lexicographic within each disc.
/// Throws LevelTooCoarse unless n > m.
Discretization discretize(const DiscAssignment& assign, const Dendrogram& dendrogram,
                          const TreeMeasure& nu, std::size_t n);

/// Cells of level n inside a ball, in lexicographic digit order.
std::vector<PAdicCell> cells_below(const PAdicCell& ball, std::size_t n);

}  // namespace ultradiff
