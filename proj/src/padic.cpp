#include "ultradiff/padic.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "ultradiff/error.hpp"
#include "ultradiff/multitopo.hpp"

namespace ultradiff {

bool PAdicCell::contains(const PAdicCell& finer) const {
  return p == finer.p && finer.digits.size() >= digits.size() &&
         std::equal(digits.begin(), digits.end(), finer.digits.begin());
}

PAdicCell PAdicCell::child(std::uint32_t digit) const {
  PAdicCell c = *this;
  c.digits.push_back(digit);
  return c;
}

PAdicCell PAdicCell::prefix(std::size_t n) const {
  PAdicCell c{p, {}};
  c.digits.assign(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(std::min(n, digits.size())));
  return c;
}

std::string PAdicCell::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && p > 10) s += '.';
    s += std::to_string(digits[i]);
  }
  return s.empty() ? "-" : s;
}

std::size_t common_prefix(const PAdicCell& x, const PAdicCell& y) {
  const std::size_t n = std::min(x.digits.size(), y.digits.size());
  std::size_t j = 0;
  while (j < n && x.digits[j] == y.digits[j]) ++j;
  return j;
}

double inverse_power(std::uint32_t p, std::size_t k) {
  long double v = 1.0L;
  for (std::size_t i = 0; i < k; ++i) v /= static_cast<long double>(p);
  return static_cast<double>(v);
}

double padic_distance(const PAdicCell& x, const PAdicCell& y) {
  if (x.p != y.p) {
    throw Error(ErrorCode::PrimeMismatch,
                "cells over p=" + std::to_string(x.p) + " and p=" + std::to_string(y.p));
  }
  if (x.level() != y.level()) {
    throw Error(ErrorCode::InvalidInput, "cells of different levels");
  }
  if (x == y) return 0.0;
  return inverse_power(x.p, common_prefix(x, y));
}

std::optional<std::size_t> DiscAssignment::vertex_of(const PAdicCell& cell) const {
  if (cell.p != p || cell.level() < m) return std::nullopt;
  for (std::size_t v = 0; v < discs.size(); ++v) {
    if (discs[v].contains(cell)) return v;
  }
  return std::nullopt;
}

DiscAssignment embed(const Dendrogram& dendrogram, std::uint32_t min_prime) {
  DiscAssignment assign;
  std::uint32_t p = std::max<std::uint32_t>(
      {2u, min_prime, static_cast<std::uint32_t>(dendrogram.max_branching())});
  while (!is_prime(p)) ++p;
  assign.p = p;

  std::vector<double> radii;
  for (const auto& node : dendrogram.nodes()) {
    if (!node.is_leaf()) radii.push_back(node.radius);
  }
  std::sort(radii.begin(), radii.end(), std::greater<>());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  assign.m = radii.size();
  assign.rho_table = radii;

  auto level_of = [&](const DendrogramNode& node) -> std::size_t {
    if (node.is_leaf()) return assign.m;
    return static_cast<std::size_t>(
        std::find(radii.begin(), radii.end(), node.radius) - radii.begin());
  };

  assign.node_balls.assign(dendrogram.node_count(), PAdicCell{p, {}});
  std::vector<std::size_t> stack{dendrogram.root()};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const auto& node = dendrogram.node(id);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const auto child = node.children[i];
      PAdicCell ball = assign.node_balls[id].child(static_cast<std::uint32_t>(i));
      ball.digits.resize(level_of(dendrogram.node(child)), 0);
      assign.node_balls[child] = std::move(ball);
      stack.push_back(child);
    }
  }
  assign.discs.resize(dendrogram.vertex_count());
  for (std::size_t v = 0; v < dendrogram.vertex_count(); ++v) {
    assign.discs[v] = assign.node_balls[dendrogram.leaf(v)];
  }
  return assign;
}

TreeMeasure tree_measure(const Dendrogram& dendrogram) {
  TreeMeasure nu;
  nu.denominators.assign(dendrogram.node_count(), 0);
  nu.denominators[dendrogram.root()] = 1;
  std::vector<std::size_t> stack{dendrogram.root()};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const auto& node = dendrogram.node(id);
    const std::uint64_t c = node.children.size();
    for (auto child : node.children) {
      if (nu.denominators[id] > std::numeric_limits<std::uint64_t>::max() / c) {
        throw Error(ErrorCode::TooLarge, "tree measure denominator overflows 64 bits");
      }
      nu.denominators[child] = nu.denominators[id] * c;
      stack.push_back(child);
    }
  }
  return nu;
}

std::vector<PAdicCell> cells_below(const PAdicCell& ball, std::size_t n) {
  std::vector<PAdicCell> out;
  if (n < ball.level()) return out;
  const std::size_t extra = n - ball.level();
  PAdicCell cell = ball;
  cell.digits.resize(n, 0);
  // Odometer over the trailing digits, most significant (leftmost) slowest.
  while (true) {
    out.push_back(cell);
    std::size_t pos = n;
    while (pos > ball.level()) {
      --pos;
      if (++cell.digits[pos] < ball.p) break;
      cell.digits[pos] = 0;
      if (pos == ball.level()) return out;
    }
    if (extra == 0) return out;
  }
}

std::optional<std::size_t> Discretization::find(const PAdicCell& cell) const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].cell == cell) return i;
  }
  return std::nullopt;
}

double Discretization::haar_total() const {
  double total = 0.0;
  for (const auto& c : cells) total += c.haar;
  return total;
}

double Discretization::nu_total() const {
  double total = 0.0;
  for (const auto& c : cells) total += c.nu;
  return total;
}

Discretization discretize(const DiscAssignment& assign, const Dendrogram& dendrogram,
                          const TreeMeasure& nu, std::size_t n) {
  if (n <= assign.m) {
    throw Error(ErrorCode::LevelTooCoarse, "level " + std::to_string(n) +
                                               " does not refine vertex discs of level " +
                                               std::to_string(assign.m));
  }
  Discretization disc;
  disc.p = assign.p;
  disc.level = n;
  const double haar = inverse_power(assign.p, n);
  const double split = inverse_power(assign.p, n - assign.m);
  for (std::size_t v = 0; v < assign.discs.size(); ++v) {
    const auto leaf = dendrogram.leaf(v);
    const double nu_cell = nu.of_node(leaf) * split;
    for (auto& cell : cells_below(assign.discs[v], n)) {
      disc.cells.push_back({std::move(cell), v, leaf, haar, nu_cell});
    }
  }
  return disc;
}

}  // namespace ultradiff
