#include "rcq/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rcq {

Coord next_pow2(Coord v) {
  if (v <= 1) return 1;
  return static_cast<Coord>(std::bit_ceil(static_cast<std::uint64_t>(v)));
}

int floor_log2(Coord v) {
  if (v <= 0) throw std::invalid_argument("floor_log2 of non-positive value");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(v))) - 1;
}

DomainSpec DomainSpec::make(int dim, Coord delta) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (delta < 1) throw std::invalid_argument("domain side must be positive");
  if (delta > (Coord{1} << 40)) throw std::invalid_argument("domain side too large");
  return DomainSpec{dim, next_pow2(delta)};
}

int DomainSpec::log_delta() const { return floor_log2(delta); }

bool DomainSpec::contains(const Coords& p) const {
  for (int k = 0; k < kMaxDim; ++k) {
    if (k < dim) {
      if (p[k] < 0 || p[k] >= delta) return false;
    } else if (p[k] != 0) {
      return false;
    }
  }
  return true;
}

Rect Rect::full(const DomainSpec& dom) {
  Rect r;
  for (int k = 0; k < dom.dim; ++k) r.hi[k] = dom.delta - 1;
  r.empty = false;
  return r;
}

Rect Rect::clipped(const DomainSpec& dom, const Coords& lo, const Coords& hi) {
  Rect r;
  r.empty = false;
  for (int k = 0; k < dom.dim; ++k) {
    r.lo[k] = std::max<Coord>(lo[k], 0);
    r.hi[k] = std::min<Coord>(hi[k], dom.delta - 1);
    if (r.lo[k] > r.hi[k]) r.empty = true;
  }
  if (r.empty) r.lo = r.hi = Coords{};
  return r;
}

bool Rect::contains(const Coords& p, int dim) const {
  if (empty) return false;
  for (int k = 0; k < dim; ++k)
    if (p[k] < lo[k] || p[k] > hi[k]) return false;
  return true;
}

namespace {
inline std::size_t mix(std::size_t h, std::uint64_t v) {
  v ^= v >> 33;
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33;
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}
}  // namespace

std::size_t RectHash::operator()(const Rect& r) const noexcept {
  std::size_t h = r.empty ? 1 : 0;
  for (int k = 0; k < kMaxDim; ++k) {
    h = mix(h, static_cast<std::uint64_t>(r.lo[k]));
    h = mix(h, static_cast<std::uint64_t>(r.hi[k]));
  }
  return h;
}

std::size_t QuadCellHash::operator()(const QuadCell& c) const noexcept {
  std::size_t h = static_cast<std::size_t>(c.level);
  for (int k = 0; k < kMaxDim; ++k) h = mix(h, static_cast<std::uint64_t>(c.index[k]));
  return h;
}

ShiftVector ShiftVector::random(const DomainSpec& dom, std::uint64_t seed) {
  ShiftVector s;
  s.seed = seed;
  Rng rng(seed);
  std::uniform_int_distribution<Coord> pick(0, dom.delta - 1);
  for (int k = 0; k < dom.dim; ++k) s.v[k] = pick(rng);
  return s;
}

QuadCell root_cell(const DomainSpec& dom) { return QuadCell{dom.root_level(), Coords{}}; }

QuadCell cell_of(const DomainSpec& dom, const Coords& p, int level, const ShiftVector& shift) {
  if (level < 0 || level > dom.root_level()) throw std::out_of_range("cell level out of range");
  QuadCell c;
  c.level = level;
  for (int k = 0; k < dom.dim; ++k) c.index[k] = (p[k] + shift.v[k]) >> level;
  return c;
}

Rect cell_rect(const DomainSpec& dom, const QuadCell& c, const ShiftVector& shift) {
  Coords lo{}, hi{};
  const Coord s = c.side();
  for (int k = 0; k < dom.dim; ++k) {
    lo[k] = c.index[k] * s - shift.v[k];
    hi[k] = lo[k] + s - 1;
  }
  return Rect::clipped(dom, lo, hi);
}

std::vector<QuadCell> children(const QuadCell& c, int dim) {
  if (c.level == 0) return {};
  std::vector<QuadCell> out;
  const int m = 1 << dim;
  out.reserve(static_cast<std::size_t>(m));
  for (int mask = 0; mask < m; ++mask) {
    QuadCell ch;
    ch.level = c.level - 1;
    // Axis 0 takes the most significant bit so the enumeration is
    // lexicographic in the child centers.
    for (int k = 0; k < dim; ++k) {
      const int bit = (mask >> (dim - 1 - k)) & 1;
      ch.index[k] = 2 * c.index[k] + bit;
    }
    out.push_back(ch);
  }
  return out;
}

QuadCell parent(const QuadCell& c) {
  QuadCell p;
  p.level = c.level + 1;
  for (int k = 0; k < kMaxDim; ++k) p.index[k] = c.index[k] >> 1;
  return p;
}

bool cell_contains(const QuadCell& outer, const QuadCell& inner, int dim) {
  if (inner.level > outer.level) return false;
  const int shift = outer.level - inner.level;
  for (int k = 0; k < dim; ++k)
    if ((inner.index[k] >> shift) != outer.index[k]) return false;
  return true;
}

double cell_distance(const QuadCell& a, const QuadCell& b, int dim) {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) {
    // Centers are index*side + side/2; doubled to stay integral.
    const Coord ca = (2 * a.index[k] + 1) * a.side();
    const Coord cb = (2 * b.index[k] + 1) * b.side();
    const double diff = static_cast<double>(ca - cb) / 2.0;
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double cell_box_distance(const QuadCell& a, const QuadCell& b, int dim) {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) {
    const Coord alo = a.index[k] * a.side(), ahi = alo + a.side();
    const Coord blo = b.index[k] * b.side(), bhi = blo + b.side();
    Coord gap = 0;
    if (ahi < blo) gap = blo - ahi;
    else if (bhi < alo) gap = alo - bhi;
    sum += static_cast<double>(gap) * static_cast<double>(gap);
  }
  return std::sqrt(sum);
}

int common_level(const Coords& p, const Coords& q, int dim, const ShiftVector& shift) {
  Coord diff = 0;
  for (int k = 0; k < dim; ++k) diff |= (p[k] + shift.v[k]) ^ (q[k] + shift.v[k]);
  return diff == 0 ? 0 : static_cast<int>(std::bit_width(static_cast<std::uint64_t>(diff)));
}

std::strong_ordering z_order_cmp(const Coords& p, const Coords& q, int dim,
                                 const ShiftVector& shift) {
  const int j = common_level(p, q, dim, shift);
  if (j == 0) return std::strong_ordering::equal;
  for (int k = 0; k < dim; ++k) {
    const Coord bp = ((p[k] + shift.v[k]) >> (j - 1)) & 1;
    const Coord bq = ((q[k] + shift.v[k]) >> (j - 1)) & 1;
    if (bp != bq) return bp < bq ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;  // unreachable: the points differ at level j-1
}

std::int64_t tree_length_at_level(int level) { return (std::int64_t{1} << (level + 2)) - 4; }

TreeDist tree_distance(const Coords& p, const Coords& q, int dim, const ShiftVector& shift) {
  return TreeDist{tree_length_at_level(common_level(p, q, dim, shift))};
}

double euclidean(const Coords& p, const Coords& q, int dim) {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = static_cast<double>(p[k] - q[k]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace rcq
