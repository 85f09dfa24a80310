#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "rcq/emd.hpp"

namespace rcq {

std::int64_t exact_emd_1d(std::span<const Point> red, std::span<const Point> blue) {
  if (red.size() != blue.size()) throw std::invalid_argument("red and blue sets differ in size");
  std::vector<Coord> r, b;
  r.reserve(red.size());
  b.reserve(blue.size());
  for (const auto& p : red) r.push_back(p.x[0]);
  for (const auto& p : blue) b.push_back(p.x[0]);
  std::sort(r.begin(), r.end());
  std::sort(b.begin(), b.end());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < r.size(); ++i) total += std::llabs(r[i] - b[i]);
  return total;
}

std::int64_t exact_emd_1d(const PointSet& ps) {
  if (ps.domain.dim != 1) throw std::invalid_argument("exact_emd_1d needs a 1D instance");
  return exact_emd_1d(ps.only(Color::red), ps.only(Color::blue));
}

double exact_emd(std::span<const Point> red, std::span<const Point> blue, int dim) {
  if (red.size() != blue.size()) throw std::invalid_argument("red and blue sets differ in size");
  if (red.size() > kExactEmdCap) throw std::invalid_argument("exact_emd size cap exceeded");
  const std::size_t n = red.size();
  if (n == 0) return 0.0;

  // Shortest augmenting path with potentials; rows are red, columns blue,
  // both 1-based with column 0 as the virtual start.
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = euclidean(red[i].x, blue[j].x, dim);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      const double* row = &cost[(i0 - 1) * n];
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) total += cost[(p[j] - 1) * n + (j - 1)];
  return total;
}

double exact_emd(const PointSet& ps) {
  return exact_emd(ps.only(Color::red), ps.only(Color::blue), ps.domain.dim);
}

std::int64_t greedy_matching_cost_exact(const PointSet& ps, const ShiftVector& shift) {
  if (ps.count(Color::red) != ps.count(Color::blue))
    throw std::invalid_argument("red and blue sets differ in size");
  const auto& dom = ps.domain;
  std::int64_t total = 0;
  for (int level = 0; level < dom.root_level(); ++level) {
    std::unordered_map<QuadCell, CellCounts, QuadCellHash> cells;
    for (const auto& p : ps.points) {
      if (p.color == Color::plain) continue;
      auto& cc = cells[cell_of(dom, p.x, level, shift)];
      (p.color == Color::red ? cc.red : cc.blue) += 1;
    }
    const std::int64_t weight = std::int64_t{2} << level;
    for (const auto& [cell, cc] : cells) total += std::llabs(cc.red - cc.blue) * weight;
  }
  return total;
}

}  // namespace rcq
