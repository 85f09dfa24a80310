#pragma once

// Slow reference implementations used only by the tests. None of these call
// into the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/point_set.hpp"

namespace brute {

using rcq::Color;
using rcq::Coord;
using rcq::Coords;
using rcq::Point;
using rcq::PointSet;

inline int log2_exact(Coord v) {
  int k = 0;
  while ((Coord{1} << k) < v) ++k;
  return k;
}

inline PointSet random_points(int dim, Coord delta, std::int64_t nr, std::int64_t nb, std::int64_t np,
                              std::mt19937_64& rng) {
  PointSet ps;
  ps.domain.dim = dim;
  ps.domain.delta = delta;
  std::uniform_int_distribution<Coord> pick(0, delta - 1);
  auto add = [&](std::int64_t k, Color c) {
    for (std::int64_t i = 0; i < k; ++i) {
      Point p;
      p.color = c;
      for (int a = 0; a < dim; ++a) p.x[a] = pick(rng);
      ps.points.push_back(p);
    }
  };
  add(nr, Color::red);
  add(nb, Color::blue);
  add(np, Color::plain);
  return ps;
}

/// Points clustered in a few small blobs, so duplicates and empty regions
/// both occur.
inline PointSet clustered_points(int dim, Coord delta, std::int64_t n, int blobs, Coord radius,
                                 std::mt19937_64& rng) {
  PointSet ps;
  ps.domain.dim = dim;
  ps.domain.delta = delta;
  std::uniform_int_distribution<Coord> pick(0, delta - 1), off(-radius, radius);
  std::vector<Coords> centers(blobs);
  for (auto& c : centers)
    for (int a = 0; a < dim; ++a) c[a] = pick(rng);
  for (std::int64_t i = 0; i < n; ++i) {
    Point p;
    const auto& c = centers[static_cast<std::size_t>(i % blobs)];
    for (int a = 0; a < dim; ++a) p.x[a] = std::clamp<Coord>(c[a] + off(rng), 0, delta - 1);
    ps.points.push_back(p);
  }
  return ps;
}

inline bool inside(const Coords& p, const Coords& lo, const Coords& hi, int dim) {
  for (int a = 0; a < dim; ++a)
    if (p[a] < lo[a] || p[a] > hi[a]) return false;
  return true;
}

inline std::int64_t scan_count(const std::vector<Point>& pts, const Coords& lo, const Coords& hi, int dim) {
  std::int64_t k = 0;
  for (const auto& p : pts) k += inside(p.x, lo, hi, dim);
  return k;
}

inline std::vector<Coords> lex_sorted(const std::vector<Point>& pts) {
  std::vector<Coords> v;
  for (const auto& p : pts) v.push_back(p.x);
  std::sort(v.begin(), v.end());
  return v;
}

/// Morton key of p + shift with axis 0 as the most significant bit of each
/// group.
inline unsigned __int128 morton(const Coords& p, const Coords& shift, int dim, int bits) {
  unsigned __int128 key = 0;
  for (int b = bits - 1; b >= 0; --b)
    for (int a = 0; a < dim; ++a) key = (key << 1) | static_cast<unsigned>(((p[a] + shift[a]) >> b) & 1);
  return key;
}

/// Leaves of the unshifted quadtree over [Δ]^d in visiting order, by explicit
/// recursion over the cell boxes.
inline void quadtree_leaves(Coords lo, Coord side, int dim, std::vector<Coords>& out) {
  if (side == 1) {
    out.push_back(lo);
    return;
  }
  const Coord h = side / 2;
  for (int child = 0; child < (1 << dim); ++child) {
    Coords c = lo;
    for (int a = 0; a < dim; ++a)
      if ((child >> (dim - 1 - a)) & 1) c[a] += h;
    quadtree_leaves(c, h, dim, out);
  }
}

struct Item {
  Coords x{};
  std::int64_t occurrence = 1;
};

struct GreedyPair {
  Item red, blue;
  int level = 0;
};

/// Bottom-up greedy matching: at every level, each cell pairs its unmatched
/// reds and blues in z-order (ties at a location broken by occurrence) and
/// passes the rest up.
inline std::vector<GreedyPair> greedy_simulation(const PointSet& ps, const Coords& shift) {
  const int dim = ps.domain.dim;
  const int bits = log2_exact(ps.domain.delta) + 1;
  auto items_of = [&](Color c) {
    std::vector<Item> v;
    std::map<Coords, std::int64_t> seen;
    for (const auto& p : ps.points)
      if (p.color == c) v.push_back({p.x, ++seen[p.x]});
    std::sort(v.begin(), v.end(), [&](const Item& a, const Item& b) {
      const auto ka = morton(a.x, shift, dim, bits), kb = morton(b.x, shift, dim, bits);
      return ka != kb ? ka < kb : a.occurrence < b.occurrence;
    });
    return v;
  };
  std::vector<Item> reds = items_of(Color::red), blues = items_of(Color::blue);
  std::vector<GreedyPair> pairs;
  for (int level = 0; level <= bits; ++level) {
    auto cell = [&](const Item& it) {
      Coords c{};
      for (int a = 0; a < dim; ++a) c[a] = (it.x[a] + shift[a]) >> level;
      return c;
    };
    std::map<Coords, std::vector<Item>> rc, bc;
    std::vector<Coords> order;
    for (const auto& it : reds) rc[cell(it)].push_back(it);
    for (const auto& it : blues) bc[cell(it)].push_back(it);
    std::vector<Item> nr, nb;
    // Surviving lists stay in z-order because cells are z-contiguous.
    std::map<Coords, std::pair<std::size_t, std::size_t>> used;
    for (auto& [c, rv] : rc) {
      auto it = bc.find(c);
      if (it == bc.end()) continue;
      const std::size_t k = std::min(rv.size(), it->second.size());
      for (std::size_t i = 0; i < k; ++i) pairs.push_back({rv[i], it->second[i], level});
      used[c] = {k, k};
    }
    for (const auto& it : reds) {
      auto u = used.find(cell(it));
      if (u != used.end() && u->second.first > 0) {
        --u->second.first;
        continue;
      }
      nr.push_back(it);
    }
    for (const auto& it : blues) {
      auto u = used.find(cell(it));
      if (u != used.end() && u->second.second > 0) {
        --u->second.second;
        continue;
      }
      nb.push_back(it);
    }
    reds.swap(nr);
    blues.swap(nb);
  }
  return pairs;
}

inline double dist(const Coords& p, const Coords& q, int dim) {
  double s = 0;
  for (int a = 0; a < dim; ++a) {
    const double d = static_cast<double>(p[a] - q[a]);
    s += d * d;
  }
  return std::sqrt(s);
}

/// EMD by trying every permutation; only for tiny inputs.
inline double permutation_emd(const std::vector<Point>& red, const std::vector<Point>& blue, int dim) {
  std::vector<int> perm(blue.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0;
    for (std::size_t i = 0; i < red.size(); ++i) c += dist(red[i].x, blue[static_cast<std::size_t>(perm[i])].x, dim);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// MST weight by decoding every Prüfer sequence; only for tiny inputs.
inline double exhaustive_mst(const std::vector<Coords>& v, int dim) {
  const int n = static_cast<int>(v.size());
  if (n < 2) return 0.0;
  if (n == 2) return dist(v[0], v[1], dim);
  std::vector<int> seq(static_cast<std::size_t>(n - 2), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> deg(static_cast<std::size_t>(n), 1);
    for (int x : seq) ++deg[static_cast<std::size_t>(x)];
    double w = 0;
    for (int x : seq) {
      int leaf = 0;
      while (deg[static_cast<std::size_t>(leaf)] != 1) ++leaf;
      w += dist(v[static_cast<std::size_t>(leaf)], v[static_cast<std::size_t>(x)], dim);
      --deg[static_cast<std::size_t>(leaf)];
      --deg[static_cast<std::size_t>(x)];
    }
    int a = -1, b = -1;
    for (int i = 0; i < n; ++i)
      if (deg[static_cast<std::size_t>(i)] == 1) (a < 0 ? a : b) = i;
    w += dist(v[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)], dim);
    best = std::min(best, w);
    std::size_t i = 0;
    while (i < seq.size() && ++seq[i] == n) seq[i++] = 0;
    if (i == seq.size()) break;
  }
  return best;
}

/// Components of the graph on `n` vertices with the given edges.
inline std::int64_t components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return p[static_cast<std::size_t>(x)] == x ? x : p[static_cast<std::size_t>(x)] = find(p[static_cast<std::size_t>(x)]);
  };
  std::int64_t c = n;
  for (auto [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) {
      p[static_cast<std::size_t>(ra)] = rb;
      --c;
    }
  }
  return c;
}

}  // namespace brute
