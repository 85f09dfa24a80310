#pragma once

#include <cstdint>

#include "rcq/geometry.hpp"
#include "rcq/oracle.hpp"

namespace rcq {

/// Location of the lexicographically k-th point in q (1-based, multiplicity
/// counted). One binary search per axis; at most d*ceil(log2 Δ) + 1 queries.
/// Throws std::out_of_range unless 1 <= k <= count(q).
Coords kth_lex(QuerySession& s, const Rect& q, std::int64_t k);

struct LexHit {
  Coords location{};
  /// Rank of the hit among the points sharing its location (1-based).
  std::int64_t occurrence = 1;
};

/// kth_lex that also reports which of the coinciding points was selected.
LexHit kth_lex_hit(QuerySession& s, const Rect& q, std::int64_t k);

struct ZorderHit {
  Coords location{};
  /// Rank of the hit among the points sharing its location (1-based).
  std::int64_t occurrence = 1;
};

/// k-th point of the cell in z-order of the shifted quadtree, found by
/// descending through the children. At most 2^d*(log2 Δ + 1) queries.
ZorderHit kth_zorder(QuerySession& s, const QuadCell& within, std::int64_t k,
                     const ShiftVector& shift);

struct RankedSample {
  Coords location{};
  std::int64_t rank = 1;
  std::int64_t occurrence = 1;
};

/// Uniform point of the multiset: a uniform rank then kth_lex.
RankedSample sample_uniform_ranked(QuerySession& s, Rng& rng);
Coords sample_uniform(QuerySession& s, Rng& rng);

/// Smallest axis-aligned square with integer side holding every point.
Rect bounding_square(QuerySession& s);

}  // namespace rcq
