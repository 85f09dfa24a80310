#include "rcq/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcq {

std::string to_string(GadgetFamily f) {
  switch (f) {
    case GadgetFamily::emd1d: return "emd1d";
    case GadgetFamily::emd2d: return "emd2d";
    case GadgetFamily::emd3d: return "emd3d";
    case GadgetFamily::cellsampling: return "cellsampling";
    case GadgetFamily::mst: return "mst";
  }
  return "unknown";
}

GadgetFamily parse_family(const std::string& name) {
  for (auto f : {GadgetFamily::emd1d, GadgetFamily::emd2d, GadgetFamily::emd3d,
                 GadgetFamily::cellsampling, GadgetFamily::mst})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown gadget family: " + name);
}

namespace {

std::int64_t int_root_ceil(std::int64_t v, int k) {
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / k)));
  auto pw = [k](std::int64_t x) {
    std::int64_t p = 1;
    for (int i = 0; i < k; ++i) p *= x;
    return p;
  };
  while (r > 1 && pw(r - 1) >= v) --r;
  while (pw(r) < v) ++r;
  return std::max<std::int64_t>(r, 1);
}

void check_witness(std::optional<std::int64_t> w, std::int64_t cells) {
  if (w && (*w < 0 || *w >= cells)) throw std::invalid_argument("witness index out of range");
}

/// One 1D run pair along axis 0 starting at `at`, length g.
void place_line(std::vector<Point>& out, Coords at, Coord g, std::int64_t m, bool far, bool swap) {
  const Color first = swap ? Color::blue : Color::red;
  const Color second = swap ? Color::red : Color::blue;
  auto put = [&](Coord x, Color c) {
    Coords p = at;
    p[0] += x;
    out.push_back(Point{p, c});
  };
  if (far) {
    for (std::int64_t j = 0; j < m; ++j) put(0, first);
    for (std::int64_t j = 0; j < m; ++j) put(g - 1, second);
    return;
  }
  for (std::int64_t j = 0; j < m; ++j) put(j, j % 2 == 0 ? first : second);
  for (std::int64_t j = 0; j < m; ++j) put(g - m + j, j % 2 == 0 ? first : second);
}

}  // namespace

GadgetInstance gen_emd_lb(int d, std::int64_t n, std::int64_t s,
                          std::optional<std::int64_t> witness, Coord delta) {
  if (d < 1 || d > 3) throw std::invalid_argument("gadget dimension must be 1, 2 or 3");
  if (n < 1 || s < 1) throw std::invalid_argument("n and s must be positive");

  // Cells per axis and total cells.
  std::int64_t per_axis = 0, s_eff = s;
  if (d == 1) {
    per_axis = 8 * s;
  } else {
    const std::int64_t q = int_root_ceil(s, d);
    s_eff = d == 2 ? q * q : q * q * q;
    per_axis = 4 * q;
  }
  std::int64_t cells = 1;
  for (int k = 0; k < d; ++k) cells *= per_axis;
  const std::int64_t copies = std::int64_t{1} << (d - 1);
  std::int64_t m = (n + cells * copies - 1) / (cells * copies);
  m = std::max<std::int64_t>(2, m + (m % 2));
  const std::int64_t n_eff = cells * copies * m;
  if (s_eff > n_eff) throw std::invalid_argument("s exceeds n");
  check_witness(witness, cells);

  // Gadget side g; in 1D the gadget fills its segment, otherwise it sits in
  // the middle half of its cell.
  const Coord g_min = std::max<Coord>(2 * m, 2);
  const Coord cell_min = d == 1 ? g_min : 2 * g_min;
  if (delta == 0) delta = next_pow2(per_axis * cell_min);
  const DomainSpec dom = DomainSpec::make(d, delta);
  const Coord cell = dom.delta / per_axis;
  const Coord g = d == 1 ? cell : cell / 2;
  const Coord offset = d == 1 ? 0 : cell / 4;
  if (g < g_min) throw std::invalid_argument("domain too small for the gadget runs");

  GadgetInstance gi;
  gi.family = d == 1 ? GadgetFamily::emd1d : d == 2 ? GadgetFamily::emd2d : GadgetFamily::emd3d;
  gi.points.domain = dom;
  auto& pts = gi.points.points;
  pts.reserve(static_cast<std::size_t>(2 * n_eff));
  for (std::int64_t id = 0; id < cells; ++id) {
    Coords origin{};
    std::int64_t rest = id;
    for (int k = d - 1; k >= 0; --k) {
      origin[k] = (rest % per_axis) * cell + offset;
      rest /= per_axis;
    }
    const bool far = witness && *witness == id;
    for (std::int64_t combo = 0; combo < copies; ++combo) {
      Coords at = origin;
      int uppers = 0;
      for (int k = 1; k < d; ++k)
        if ((combo >> (k - 1)) & 1) {
          at[k] += g - 1;
          ++uppers;
        }
      const bool swap = d > 1 && uppers % 2 == 0;
      place_line(pts, at, g, m, far, swap);
    }
  }

  gi.params["n"] = static_cast<double>(n_eff);
  gi.params["s"] = static_cast<double>(s_eff);
  gi.params["delta"] = static_cast<double>(dom.delta);
  gi.params["cells"] = static_cast<double>(cells);
  gi.params["per_copy"] = static_cast<double>(m);
  gi.params["gadget_side"] = static_cast<double>(g);
  gi.params["witness"] = witness ? static_cast<double>(*witness) : -1.0;
  const double base = static_cast<double>(n_eff);
  const double cm = static_cast<double>(copies * m);
  gi.declared_cost = witness ? base - cm + cm * static_cast<double>(g - 1) : base;
  gi.declared_note = witness ? "far gadget: unit pairs elsewhere plus one gadget-side hop per far point"
                             : "near family: every point one unit from its mate";
  return gi;
}

GadgetInstance gen_cellsampling_lb(std::int64_t n, std::int64_t c,
                                   std::optional<std::int64_t> witness) {
  if (n < 1 || c < 1) throw std::invalid_argument("n and c must be positive");
  std::int64_t root = int_root_ceil(n, 2);
  root = ((root + 4 * c - 1) / (4 * c)) * (4 * c);
  const std::int64_t n_eff = root * root;
  const std::int64_t segments = root / (4 * c);
  const std::int64_t seg_len = 4 * c * root;
  check_witness(witness, segments);

  GadgetInstance gi;
  gi.family = GadgetFamily::cellsampling;
  gi.points.domain = DomainSpec::make(1, n_eff);
  auto& pts = gi.points.points;
  pts.reserve(static_cast<std::size_t>(n_eff));
  for (std::int64_t j = 0; j < segments; ++j) {
    const Coord left = j * seg_len;
    if (witness && *witness == j) {
      for (std::int64_t i = 0; i < 2 * c * root; ++i) pts.push_back(Point{Coords{left}, Color::plain});
      for (std::int64_t i = 1; i <= 2 * c * root; ++i)
        pts.push_back(Point{Coords{left + i}, Color::plain});
    } else {
      for (std::int64_t i = 0; i < seg_len; ++i) pts.push_back(Point{Coords{left}, Color::plain});
    }
  }
  gi.params["n"] = static_cast<double>(n_eff);
  gi.params["c"] = static_cast<double>(c);
  gi.params["delta"] = static_cast<double>(gi.points.domain.delta);
  gi.params["segments"] = static_cast<double>(segments);
  gi.params["witness"] = witness ? static_cast<double>(*witness) : -1.0;
  gi.declared_cost = static_cast<double>(witness ? 2 * c * root + segments : segments);
  gi.declared_note = "non-empty unit cells";
  return gi;
}

namespace {

void strip_into(std::vector<Point>& out, Coords at, std::int64_t k) {
  const std::int64_t count = k * k * k * k;
  for (std::int64_t i = 0; i < count; ++i)
    out.push_back(Point{Coords{at[0] + i * k, at[1] + i * k, 0}, Color::plain});
}

void uniform_into(std::vector<Point>& out, Coords at, std::int64_t k) {
  const std::int64_t rows = k * k * k * k;
  for (std::int64_t i = 0; i < rows; ++i) {
    const std::int64_t col = (i * k * k) % rows;
    out.push_back(Point{Coords{at[0] + col * k, at[1] + i * k, 0}, Color::plain});
  }
}

}  // namespace

PointSet mst_strip_gadget(std::int64_t k) {
  PointSet ps;
  ps.domain = DomainSpec::make(2, k * k * k * k * k);
  strip_into(ps.points, Coords{}, k);
  return ps;
}

PointSet mst_uniform_gadget(std::int64_t k) {
  PointSet ps;
  ps.domain = DomainSpec::make(2, k * k * k * k * k);
  uniform_into(ps.points, Coords{}, k);
  return ps;
}

GadgetInstance gen_mst_lb(std::int64_t n, std::optional<std::int64_t> witness) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const std::int64_t k = std::max<std::int64_t>(2, int_root_ceil(n, 6));
  const std::int64_t k5 = k * k * k * k * k;
  const std::int64_t n_eff = k5 * k;
  const std::int64_t per_axis = 4 * k;
  const Coord cell = 4 * k5;
  check_witness(witness, per_axis * per_axis);

  GadgetInstance gi;
  gi.family = GadgetFamily::mst;
  gi.points.domain = DomainSpec::make(2, per_axis * cell);
  auto& pts = gi.points.points;
  for (std::int64_t id = 0; id < per_axis * per_axis; ++id) {
    const Coords at{(id / per_axis) * cell + (cell - k5) / 2, (id % per_axis) * cell + (cell - k5) / 2, 0};
    if (witness && *witness == id) uniform_into(pts, at, k);
    else strip_into(pts, at, k);
  }
  gi.params["n"] = static_cast<double>(n_eff);
  gi.params["k"] = static_cast<double>(k);
  gi.params["delta"] = static_cast<double>(gi.points.domain.delta);
  gi.params["cells"] = static_cast<double>(per_axis * per_axis);
  gi.params["witness"] = witness ? static_cast<double>(*witness) : -1.0;
  return gi;
}

}  // namespace rcq
