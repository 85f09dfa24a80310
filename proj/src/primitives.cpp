#include "rcq/primitives.hpp"

#include <algorithm>
#include <stdexcept>

namespace rcq {

Coords kth_lex(QuerySession& s, const Rect& q, std::int64_t k) { return kth_lex_hit(s, q, k).location; }

LexHit kth_lex_hit(QuerySession& s, const Rect& q, std::int64_t k) {
  const int dim = s.domain().dim;
  const std::int64_t total = s.count(q);
  if (k < 1 || k > total) throw std::out_of_range("kth_lex: rank out of range");

  Rect box = q;
  for (int axis = 0; axis < dim; ++axis) {
    // Smallest x with count(box ∩ {x_axis <= x}) >= k.
    Coord lo = box.lo[axis], hi = box.hi[axis];
    std::int64_t below = 0;
    while (lo < hi) {
      const Coord mid = lo + (hi - lo) / 2;
      Rect probe = box;
      probe.hi[axis] = mid;
      const auto c = s.count(probe);
      if (c >= k) {
        hi = mid;
      } else {
        lo = mid + 1;
        below = c;
      }
    }
    k -= below;
    box.lo[axis] = box.hi[axis] = lo;
  }
  return LexHit{box.lo, k};
}

ZorderHit kth_zorder(QuerySession& s, const QuadCell& within, std::int64_t k,
                     const ShiftVector& shift) {
  const auto& dom = s.domain();
  const std::int64_t total = s.count(cell_rect(dom, within, shift));
  if (k < 1 || k > total) throw std::out_of_range("kth_zorder: rank out of range");

  QuadCell cell = within;
  std::int64_t remaining = total;
  while (cell.level > 0) {
    const auto kids = children(cell, dom.dim);
    std::int64_t seen = 0;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      // The last child's count is implied by the parent's.
      const std::int64_t c =
          (i + 1 == kids.size()) ? remaining - seen : s.count(cell_rect(dom, kids[i], shift));
      if (seen + c >= k) {
        k -= seen;
        remaining = c;
        cell = kids[i];
        break;
      }
      seen += c;
    }
  }
  Rect r = cell_rect(dom, cell, shift);
  return ZorderHit{r.lo, k};
}

RankedSample sample_uniform_ranked(QuerySession& s, Rng& rng) {
  const std::int64_t n = s.n();
  if (n < 1) throw std::invalid_argument("cannot sample from an empty set");
  std::uniform_int_distribution<std::int64_t> pick(1, n);
  const std::int64_t k = pick(rng);
  const auto hit = kth_lex_hit(s, Rect::full(s.domain()), k);
  return RankedSample{hit.location, k, hit.occurrence};
}

Coords sample_uniform(QuerySession& s, Rng& rng) { return sample_uniform_ranked(s, rng).location; }

Rect bounding_square(QuerySession& s) {
  const auto& dom = s.domain();
  if (s.n() < 1) throw std::invalid_argument("bounding square of an empty set");
  const Rect full = Rect::full(dom);
  Coords mn{}, mx{};
  for (int axis = 0; axis < dom.dim; ++axis) {
    // Smallest x with a point at or below it.
    Coord lo = 0, hi = dom.delta - 1;
    while (lo < hi) {
      const Coord mid = lo + (hi - lo) / 2;
      Rect probe = full;
      probe.hi[axis] = mid;
      if (s.count(probe) >= 1) hi = mid;
      else lo = mid + 1;
    }
    mn[axis] = lo;
    // Largest x with a point at or above it.
    lo = mn[axis];
    hi = dom.delta - 1;
    while (lo < hi) {
      const Coord mid = lo + (hi - lo + 1) / 2;
      Rect probe = full;
      probe.lo[axis] = mid;
      if (s.count(probe) >= 1) lo = mid;
      else hi = mid - 1;
    }
    mx[axis] = lo;
  }
  Coord side = 1;
  for (int axis = 0; axis < dom.dim; ++axis) side = std::max(side, mx[axis] - mn[axis] + 1);
  Coords lo{}, hi{};
  for (int axis = 0; axis < dom.dim; ++axis) {
    lo[axis] = std::min(mn[axis], dom.delta - side);
    hi[axis] = lo[axis] + side - 1;
  }
  return Rect::clipped(dom, lo, hi);
}

}  // namespace rcq
