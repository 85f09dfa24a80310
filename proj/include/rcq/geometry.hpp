#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace rcq {

using Coord = std::int64_t;
inline constexpr int kMaxDim = 3;
using Coords = std::array<Coord, kMaxDim>;
using Rng = std::mt19937_64;

/// The discrete domain [Δ]^d. Δ is always a power of two; unused axes of
/// Coords stay zero so lexicographic comparison over all three slots is
/// the same as over the first `dim`.
struct DomainSpec {
  int dim = 2;
  Coord delta = 1;

  /// Validates the dimension and pads Δ up to the next power of two.
  static DomainSpec make(int dim, Coord delta);

  int log_delta() const;
  /// Level of the root cell (side 2Δ).
  int root_level() const { return log_delta() + 1; }
  bool contains(const Coords& p) const;

  bool operator==(const DomainSpec&) const = default;
};

Coord next_pow2(Coord v);
int floor_log2(Coord v);

enum class Color : std::uint8_t { red, blue, plain };

struct Point {
  Coords x{};
  Color color = Color::plain;

  bool operator==(const Point&) const = default;
};

inline bool lex_less(const Coords& a, const Coords& b) { return a < b; }

/// Closed axis-aligned range. Every oracle query is one of these.
struct Rect {
  Coords lo{};
  Coords hi{};
  bool empty = true;

  static Rect full(const DomainSpec& dom);
  /// Clips [lo, hi] to the domain; the result is flagged empty if any axis
  /// collapses.
  static Rect clipped(const DomainSpec& dom, const Coords& lo, const Coords& hi);

  bool contains(const Coords& p, int dim) const;
  bool operator==(const Rect&) const = default;
};

struct RectHash {
  std::size_t operator()(const Rect& r) const noexcept;
};

/// Translation of every grid of the quadtree. Cell index at level i of a
/// point p is floor((p + v) / 2^i); the root (level log2(2Δ), index 0)
/// contains the whole translated domain.
struct ShiftVector {
  Coords v{};
  std::uint64_t seed = 0;

  static ShiftVector zero() { return {}; }
  static ShiftVector random(const DomainSpec& dom, std::uint64_t seed);
  bool operator==(const ShiftVector&) const = default;
};

struct QuadCell {
  int level = 0;
  Coords index{};

  Coord side() const { return Coord{1} << level; }
  auto operator<=>(const QuadCell&) const = default;
};

struct QuadCellHash {
  std::size_t operator()(const QuadCell& c) const noexcept;
};

struct TreeDist {
  std::int64_t value = 0;
  auto operator<=>(const TreeDist&) const = default;
};

QuadCell root_cell(const DomainSpec& dom);
QuadCell cell_of(const DomainSpec& dom, const Coords& p, int level, const ShiftVector& shift);
Rect cell_rect(const DomainSpec& dom, const QuadCell& c, const ShiftVector& shift);

/// Children in lexicographic order of their centers (axis 0 most significant).
std::vector<QuadCell> children(const QuadCell& c, int dim);
QuadCell parent(const QuadCell& c);
/// True if `inner` is `outer` or one of its descendants.
bool cell_contains(const QuadCell& outer, const QuadCell& inner, int dim);

/// Euclidean distance between cell centers.
double cell_distance(const QuadCell& a, const QuadCell& b, int dim);
/// Smallest Euclidean distance between the closed boxes of two cells.
double cell_box_distance(const QuadCell& a, const QuadCell& b, int dim);

/// Lowest level whose shifted cell contains both points (0 when p == q).
int common_level(const Coords& p, const Coords& q, int dim, const ShiftVector& shift);

std::strong_ordering z_order_cmp(const Coords& p, const Coords& q, int dim,
                                 const ShiftVector& shift);

/// Quadtree metric: edges between levels i and i+1 weigh 2^{i+1}, so two
/// points meeting at level j are 2^{j+2} - 4 apart.
TreeDist tree_distance(const Coords& p, const Coords& q, int dim, const ShiftVector& shift);
std::int64_t tree_length_at_level(int level);

double euclidean(const Coords& p, const Coords& q, int dim);

}  // namespace rcq
