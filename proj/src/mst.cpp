#include "rcq/mst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "rcq/cell_sampling.hpp"
#include "rcq/primitives.hpp"

namespace rcq {

namespace {

using i128 = __int128;

Coord ceil_div(i128 a, i128 b) { return static_cast<Coord>((a + b - 1) / b); }

struct UnionFind {
  std::vector<std::int32_t> parent, rank;
  std::int64_t sets;
  explicit UnionFind(std::size_t n) : parent(n), rank(n, 0), sets(static_cast<std::int64_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    --sets;
    return true;
  }
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace

// ---- effective domain ----

Coords SpannerConfig::to_effective(const Coords& p) const {
  Coords e{};
  for (int k = 0; k < original.dim; ++k) {
    const Coord off = p[k] - origin[k];
    e[k] = identity ? off : static_cast<Coord>(i128(off) * effective.delta / side);
  }
  return e;
}

Rect SpannerConfig::to_original(const Rect& r) const {
  if (r.empty) return r;
  Coords lo{}, hi{};
  for (int k = 0; k < original.dim; ++k) {
    if (identity) {
      lo[k] = origin[k] + r.lo[k];
      hi[k] = origin[k] + r.hi[k];
    } else {
      lo[k] = origin[k] + ceil_div(i128(r.lo[k]) * side, effective.delta);
      hi[k] = origin[k] + ceil_div(i128(r.hi[k] + 1) * side, effective.delta) - 1;
    }
  }
  return Rect::clipped(original, lo, hi);
}

SpannerConfig make_spanner_config(const DomainSpec& original, const Rect& square, std::int64_t n,
                                  double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  SpannerConfig cfg;
  cfg.eps = eps;
  cfg.original = original;
  cfg.origin = square.lo;
  cfg.side = square.hi[0] - square.lo[0] + 1;
  const Coord target = next_pow2(static_cast<Coord>(std::ceil(2.0 * static_cast<double>(n) / eps)));
  if (cfg.side <= target) {
    cfg.identity = true;
    cfg.effective = DomainSpec::make(original.dim, std::max<Coord>(cfg.side, 2));
    cfg.scale_factor = 1.0;
  } else {
    cfg.identity = false;
    cfg.effective = DomainSpec::make(original.dim, target);
    cfg.scale_factor = static_cast<double>(cfg.side) / static_cast<double>(target);
  }
  return cfg;
}

SpannerConfig preprocess_domain(QuerySession& s, double eps) {
  if (s.n() < 2) throw std::invalid_argument("MST needs at least two points");
  return make_spanner_config(s.domain(), bounding_square(s), s.n(), eps);
}

EffectiveOracle::EffectiveOracle(const RangeCountOracle& inner, SpannerConfig cfg)
    : inner_(inner), cfg_(std::move(cfg)) {}

std::int64_t EffectiveOracle::count(const Rect& q) const {
  return inner_.count(cfg_.to_original(q));
}

PointSet effective_points(const PointSet& ps, const SpannerConfig& cfg) {
  PointSet out;
  out.domain = cfg.effective;
  out.points.reserve(ps.points.size());
  for (const auto& p : ps.points) out.points.push_back(Point{cfg.to_effective(p.x), p.color});
  return out;
}

// ---- spanner pieces ----

Coords representative(QuerySession& s, const QuadCell& cell) {
  const Rect r = cell_rect(s.domain(), cell, ShiftVector::zero());
  if (s.count(r) == 0) throw std::invalid_argument("representative of an empty cell");
  return kth_lex(s, r, 1);
}

double edge_length(const WspdPair& p, const Coords& rep_a, const Coords& rep_b, EdgeLength len,
                   int dim) {
  return len == EdgeLength::center ? cell_distance(p.a, p.b, dim) : euclidean(rep_a, rep_b, dim);
}

double level_radius(double eps, int i) { return std::pow(1.0 + eps, i); }

int contraction_level(double radius, const DomainSpec& dom) {
  if (radius < 4.0) return 0;
  const int level = static_cast<int>(std::floor(std::log2(radius / 4.0) + 1e-12));
  return std::clamp(level, 0, dom.log_delta());
}

int mst_levels(const DomainSpec& dom, double eps) {
  int w = 0;
  while (level_radius(eps, w) < 2.0 * static_cast<double>(dom.delta)) ++w;
  return w;
}

NeighborFinder::NeighborFinder(QuerySession& s, double eps, EdgeLength len)
    : s_(s), eps_(eps), len_(len) {}

const Coords& NeighborFinder::rep(const QuadCell& c) {
  auto it = reps_.find(c);
  if (it == reps_.end()) it = reps_.emplace(c, representative(s_, c)).first;
  return it->second;
}

std::vector<QuadCell> NeighborFinder::neighbors(const QuadCell& x, double r) {
  const auto& dom = s_.domain();
  const int dim = dom.dim;
  std::vector<QuadCell> out;
  auto touches = [&](const QuadCell& a) {
    return cell_contains(a, x, dim) || cell_contains(x, a, dim);
  };
  auto keep = [&](const QuadCell& a, const QuadCell& b) {
    if (!touches(a) && !touches(b)) return false;
    if (cell_contains(x, a, dim) && cell_contains(x, b, dim)) return false;
    return cell_box_distance(a, b, dim) <= r;
  };
  auto emit = [&](const WspdPair& p) {
    if (len_ == EdgeLength::center && cell_distance(p.a, p.b, dim) > r) return;
    const Coords ra = rep(p.a), rb = rep(p.b);
    if (edge_length(p, ra, rb, len_, dim) > r) return;
    const QuadCell ca = cell_of(dom, ra, x.level, ShiftVector::zero());
    const QuadCell cb = cell_of(dom, rb, x.level, ShiftVector::zero());
    if (ca == cb) return;
    if (ca == x) out.push_back(cb);
    else if (cb == x) out.push_back(ca);
  };
  const QuadCell root = root_cell(dom);
  wspd_visit(s_, root, root, eps_, keep, emit);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<QuadCell> neighbor_cells(QuerySession& s, const QuadCell& c, double r, double eps,
                                     EdgeLength len) {
  NeighborFinder f(s, eps, len);
  return f.neighbors(c, r);
}

// ---- component estimation ----

namespace {

/// Neighbor lists and seed weights of one contracted graph, reused across
/// seeds and repetitions.
class ContractedGraph {
 public:
  ContractedGraph(NeighborFinder& f, double radius, std::int64_t threshold)
      : f_(f), radius_(radius), threshold_(threshold) {}

  double beta(const QuadCell& v) {
    if (auto it = beta_.find(v); it != beta_.end()) return it->second;
    const auto& nv = adj(v);
    if (nv.empty()) return beta_[v] = 1.0;
    std::vector<QuadCell> order{v};
    std::unordered_set<QuadCell, QuadCellHash> seen{v};
    std::int64_t degree_sum = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const auto nb = adj(order[head]);
      degree_sum += static_cast<std::int64_t>(nb.size());
      for (const auto& u : nb) {
        if (seen.insert(u).second) {
          order.push_back(u);
          if (static_cast<std::int64_t>(order.size()) > threshold_) {
            for (const auto& w : order) beta_[w] = 0.0;
            return 0.0;
          }
        }
      }
    }
    const double edges = static_cast<double>(degree_sum) / 2.0;
    for (const auto& w : order) beta_[w] = static_cast<double>(adj(w).size()) / (2.0 * edges);
    return beta_[v];
  }

 private:
  const std::vector<QuadCell>& adj(const QuadCell& v) {
    auto it = adj_.find(v);
    if (it == adj_.end()) it = adj_.emplace(v, f_.neighbors(v, radius_)).first;
    return it->second;
  }

  NeighborFinder& f_;
  double radius_;
  std::int64_t threshold_;
  std::unordered_map<QuadCell, std::vector<QuadCell>, QuadCellHash> adj_;
  std::unordered_map<QuadCell, double, QuadCellHash> beta_;
};

int seed_count(const MstConfig& cfg, double eps) {
  return cfg.seeds > 0 ? cfg.seeds : static_cast<int>(std::ceil(8.0 / (eps * eps)));
}

int rep_count(const MstConfig& cfg, const DomainSpec& dom) {
  return cfg.reps > 0 ? cfg.reps : std::max(1, dom.log_delta());
}

ComponentEstimate estimate_level(NeighborFinder& f, int i, double eps, Rng& rng,
                                 const MstConfig& cfg) {
  QuerySession& s = f.session();
  const auto& dom = s.domain();
  const double radius = level_radius(eps, i);
  ComponentEstimate ce;
  ce.level = i;
  ce.seeds = seed_count(cfg, eps);
  ce.threshold = cell_sampling_cap(s.n());
  const int level = contraction_level(radius, dom);
  ContractedGraph g(f, radius, ce.threshold);
  std::vector<double> runs, nhats;
  for (int rep = 0; rep < rep_count(cfg, dom); ++rep) {
    CellSampler sampler(s, level, rng);
    double sum = 0.0;
    for (int j = 0; j < ce.seeds; ++j) sum += g.beta(sampler.draw(rng));
    runs.push_back(sampler.estimate() / ce.seeds * sum);
    nhats.push_back(sampler.estimate());
  }
  ce.c_hat = median(runs);
  ce.n_hat = median(nhats);
  return ce;
}

}  // namespace

ComponentEstimate estimate_components(QuerySession& s, int i, double eps, Rng& rng,
                                      const MstConfig& cfg) {
  if (i < 0 || i > mst_levels(s.domain(), eps)) throw std::out_of_range("invalid level index");
  NeighborFinder f(s, eps, cfg.length);
  return estimate_level(f, i, eps, rng, cfg);
}

Estimate estimate_mst(const RangeCountOracle& o, double eps, Rng& rng, QueryLedger& ledger,
                      const MstConfig& cfg) {
  if (o.n() < 2) throw std::invalid_argument("MST needs at least two points");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const auto before = ledger.per_phase();
  const auto start = ledger.total();

  SpannerConfig sc;
  {
    QueryLedger::Phase phase(ledger, "preprocess");
    QuerySession raw(o, ledger, true);
    sc = preprocess_domain(raw, eps);
  }
  EffectiveOracle eff(o, sc);
  QuerySession s(eff, ledger, true);
  NeighborFinder f(s, eps, cfg.length);
  const int w = mst_levels(sc.effective, eps);

  double vertices = 0.0;
  {
    QueryLedger::Phase phase(ledger, "vertices");
    std::vector<double> runs;
    for (int rep = 0; rep < rep_count(cfg, sc.effective); ++rep)
      runs.push_back(CellSampler(s, 0, rng).estimate());
    vertices = median(runs);
  }
  double weighted = 0.0;
  {
    QueryLedger::Phase phase(ledger, "components");
    for (int i = 0; i < w; ++i)
      weighted += eps * level_radius(eps, i) * estimate_level(f, i, eps, rng, cfg).c_hat;
  }
  const double effective_cost = vertices - level_radius(eps, w) + weighted;

  Estimate e;
  e.value = effective_cost * sc.scale_factor;
  e.queries_used = ledger.total() - start;
  e.params["eps"] = eps;
  e.params["levels"] = w;
  e.params["seeds"] = seed_count(cfg, eps);
  e.params["reps"] = rep_count(cfg, sc.effective);
  e.params["effective_delta"] = static_cast<double>(sc.effective.delta);
  e.params["scale_factor"] = sc.scale_factor;
  e.params["vertices"] = vertices;
  e.phase_breakdown = phase_delta(before, ledger.per_phase());
  return e;
}

// ---- exact baselines ----

double exact_mst(std::span<const Point> pts, int dim) {
  const std::size_t n = pts.size();
  if (n > kExactMstCap) throw std::invalid_argument("exact_mst size cap exceeded");
  if (n < 2) return 0.0;
  // Prim on squared integer distances over the shrinking set of outside vertices.
  std::vector<Coords> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = pts[i].x;
  std::vector<std::int64_t> best(n, std::numeric_limits<std::int64_t>::max());
  std::size_t live = n;
  Coords u = out[0];
  out[0] = out[--live];
  best[0] = best[live];
  double total = 0.0;
  while (live > 0) {
    std::size_t pick = 0;
    for (std::size_t v = 0; v < live; ++v) {
      std::int64_t d = 0;
      for (int k = 0; k < dim; ++k) {
        const std::int64_t t = out[v][k] - u[k];
        d += t * t;
      }
      if (d < best[v]) best[v] = d;
      if (best[v] < best[pick]) pick = v;
    }
    total += std::sqrt(static_cast<double>(best[pick]));
    u = out[pick];
    --live;
    out[pick] = out[live];
    best[pick] = best[live];
  }
  return total;
}

double exact_mst(const PointSet& ps) { return exact_mst(ps.points, ps.domain.dim); }

Spanner build_spanner(const PointSet& ps, double eps, EdgeLength len) {
  if (ps.points.size() > kSpannerCap) throw std::invalid_argument("spanner size cap exceeded");
  Spanner sp;
  sp.dim = ps.domain.dim;
  auto locs = locations(ps.points);
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  sp.vertices = locs;
  std::map<Coords, std::int32_t> id;
  for (std::size_t i = 0; i < locs.size(); ++i) id.emplace(locs[i], static_cast<std::int32_t>(i));

  ExactOracle o(ps.domain, ps.points);
  QueryLedger ledger;
  QuerySession s(o, ledger, true);
  NeighborFinder reps(s, eps, len);
  sp.pairs = wspd(s, eps);
  sp.edges.reserve(sp.pairs.size());
  for (const auto& p : sp.pairs) {
    const Coords ra = reps.rep(p.a), rb = reps.rep(p.b);
    sp.edges.push_back(Spanner::Edge{id.at(ra), id.at(rb), edge_length(p, ra, rb, len, sp.dim)});
  }
  return sp;
}

double spanner_mst(const Spanner& sp) {
  std::vector<Spanner::Edge> edges = sp.edges;
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.length < b.length; });
  UnionFind uf(sp.vertices.size());
  double total = 0.0;
  for (const auto& e : edges)
    if (uf.unite(e.u, e.v)) total += e.length;
  if (uf.sets > 1) throw std::logic_error("spanner is disconnected");
  return total;
}

double spanner_mst_exact(const PointSet& ps, double eps, EdgeLength len) {
  return spanner_mst(build_spanner(ps, eps, len));
}

std::vector<std::int64_t> component_counts(const Spanner& sp, double eps, int w) {
  std::vector<Spanner::Edge> edges = sp.edges;
  std::sort(edges.begin(), edges.end(),
            [](const auto& a, const auto& b) { return a.length < b.length; });
  UnionFind uf(sp.vertices.size());
  std::vector<std::int64_t> out;
  std::size_t next = 0;
  for (int i = 0; i <= w; ++i) {
    const double radius = level_radius(eps, i);
    while (next < edges.size() && edges[next].length <= radius) {
      uf.unite(edges[next].u, edges[next].v);
      ++next;
    }
    out.push_back(uf.sets);
  }
  return out;
}

std::int64_t components_exact(const PointSet& ps, double eps, int i, EdgeLength len) {
  if (i < 0) throw std::out_of_range("invalid level index");
  return component_counts(build_spanner(ps, eps, len), eps, i).back();
}

double telescoping_sum(std::span<const std::int64_t> c, std::int64_t vertices, double eps) {
  double total = 0.0;
  std::int64_t prev = vertices;
  for (std::size_t i = 0; i < c.size(); ++i) {
    total += level_radius(eps, static_cast<int>(i)) * static_cast<double>(prev - c[i]);
    prev = c[i];
  }
  return total;
}

}  // namespace rcq
