#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "brute.hpp"
#include "rcq/cell_sampling.hpp"
#include "rcq/mst.hpp"
#include "rcq/wspd.hpp"

using namespace rcq;

namespace {

PointSet plain(int dim, Coord delta, std::int64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto ps = brute::random_points(dim, delta, 0, 0, n, rng);
  ps.domain = DomainSpec::make(dim, delta);
  return ps;
}

PointSet distinct(int dim, Coord delta, std::int64_t n, std::uint64_t seed) {
  auto ps = plain(dim, delta, n, seed);
  std::sort(ps.points.begin(), ps.points.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  ps.points.erase(std::unique(ps.points.begin(), ps.points.end()), ps.points.end());
  return ps;
}

PointSet from(int dim, Coord delta, const std::vector<Coords>& pts) {
  PointSet ps;
  ps.domain = DomainSpec::make(dim, delta);
  for (const auto& p : pts) ps.points.push_back(Point{p, Color::plain});
  return ps;
}

/// Component label of every spanner vertex using edges of length <= radius.
std::vector<int> labels(const Spanner& sp, double radius) {
  std::vector<int> lab(sp.vertices.size());
  std::iota(lab.begin(), lab.end(), 0);
  std::function<int(int)> find = [&](int x) { return lab[static_cast<std::size_t>(x)] == x ? x : lab[static_cast<std::size_t>(x)] = find(lab[static_cast<std::size_t>(x)]); };
  for (const auto& e : sp.edges)
    if (e.length <= radius) lab[static_cast<std::size_t>(find(e.u))] = find(e.v);
  for (std::size_t i = 0; i < lab.size(); ++i) lab[i] = find(static_cast<int>(i));
  return lab;
}

}  // namespace

TEST_CASE("wspd: trivial cases") {
  auto ps = from(2, 64, {{1, 1, 0}, {60, 62, 0}});
  auto o = build_exact(ps);
  QueryLedger ledger;
  QuerySession s(*o, ledger);
  const QuadCell a{0, {1, 1, 0}}, b{0, {60, 62, 0}};
  const auto pairs = wspd(s, a, b, 0.5);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a == a);
  CHECK(pairs[0].b == b);
  CHECK(pairs[0].valid);
  CHECK(wspd(s, a, a, 0.5).empty());
  CHECK(well_separated(QuadCell{0, {0, 0, 0}}, QuadCell{0, {4, 0, 0}}, 0.25, 2));
  CHECK_FALSE(well_separated(QuadCell{0, {0, 0, 0}}, QuadCell{0, {3, 0, 0}}, 0.25, 2));
}

TEST_CASE("wspd covers every ordered pair exactly once") {
  for (double eps : {0.25, 0.5, 1.0})
    for (int dim : {1, 2, 3}) {
      const auto ps = distinct(dim, 64, dim == 1 ? 50 : 64, 7 + static_cast<std::uint64_t>(dim));
      const auto o = build_exact(ps);
      QueryLedger ledger;
      QuerySession s(*o, ledger, true);
      const auto pairs = wspd(s, eps);
      const auto n = ps.points.size();
      std::vector<std::vector<int>> cover(n, std::vector<int>(n, 0));
      std::vector<int> per_point(n, 0);
      for (const auto& pr : pairs) {
        if (pr.valid) {
          CHECK(eps * cell_distance(pr.a, pr.b, dim) >= std::max(pr.a.side(), pr.b.side()));
          CHECK(pr.a.side() <= 2 * pr.b.side());
          CHECK(pr.b.side() <= 2 * pr.a.side());
        } else {
          CHECK(pr.a.level == 0);
          CHECK(pr.b.level == 0);
        }
        std::vector<std::size_t> in_a, in_b;
        for (std::size_t i = 0; i < n; ++i) {
          if (cell_of(ps.domain, ps.points[i].x, pr.a.level, ShiftVector::zero()) == pr.a) in_a.push_back(i);
          if (cell_of(ps.domain, ps.points[i].x, pr.b.level, ShiftVector::zero()) == pr.b) in_b.push_back(i);
        }
        CHECK_FALSE(in_a.empty());
        CHECK_FALSE(in_b.empty());
        for (auto i : in_a) {
          ++per_point[i];
          for (auto j : in_b) ++cover[i][j];
        }
      }
      int bad = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) bad += cover[i][j] != (i == j ? 0 : 1);
      CHECK(bad == 0);
      const double kappa = 4.0;
      const int worst = *std::max_element(per_point.begin(), per_point.end());
      CHECK(worst <= kappa * std::pow(2.0, dim) / (eps * eps) * ps.domain.log_delta());
    }
}

TEST_CASE("representative is the lexicographic minimum") {
  auto ps = from(2, 16, {{2, 9, 0}, {2, 3, 0}, {5, 1, 0}});
  auto o = build_exact(ps);
  QueryLedger ledger;
  QuerySession s(*o, ledger);
  CHECK(representative(s, QuadCell{3, {0, 0, 0}}) == Coords{2, 3, 0});
  CHECK(representative(s, QuadCell{0, {5, 1, 0}}) == Coords{5, 1, 0});
  CHECK_THROWS(representative(s, QuadCell{0, {9, 9, 0}}));

  const auto rp = plain(2, 128, 300, 3);
  const auto ro = build_exact(rp);
  QuerySession rs(*ro, ledger);
  for (int level = 0; level <= 7; ++level) {
    std::map<QuadCell, Coords> best;
    for (const auto& p : rp.points) {
      const auto c = cell_of(rp.domain, p.x, level, ShiftVector::zero());
      auto it = best.find(c);
      if (it == best.end() || p.x < it->second) best[c] = p.x;
    }
    for (const auto& [c, want] : best) CHECK(representative(rs, c) == want);
  }
}

TEST_CASE("domain preprocessing") {
  // identity when the points already fit
  {
    const auto ps = from(2, 64, {{0, 0, 0}, {63, 63, 0}, {10, 30, 0}});
    const auto o = build_exact(ps);
    QueryLedger ledger;
    QuerySession s(*o, ledger);
    const auto cfg = preprocess_domain(s, 0.1);
    CHECK(cfg.identity);
    CHECK(cfg.scale_factor == 1.0);
    CHECK(cfg.effective.delta == 64);
  }
  // two far points: square side covers D, and the effective grid is O(n/eps)
  {
    const auto ps = from(2, Coord{1} << 20, {{1000, 5000, 0}, {901000, 5000, 0}});
    const auto o = build_exact(ps);
    QueryLedger ledger;
    QuerySession s(*o, ledger);
    const auto cfg = preprocess_domain(s, 0.5);
    CHECK(cfg.side >= 900001);
    CHECK_FALSE(cfg.identity);
    CHECK(cfg.effective.delta == 8);
    CHECK(cfg.scale_factor * static_cast<double>(cfg.effective.delta) >= static_cast<double>(cfg.side));
  }
  QueryLedger ledger;
  const auto one = from(2, 8, {{1, 1, 0}});
  const auto o1 = build_exact(one);
  QuerySession s1(*o1, ledger);
  CHECK_THROWS(preprocess_domain(s1, 0.5));
}

TEST_CASE("effective counts equal explicitly snapped points") {
  std::mt19937_64 rng(8);
  auto ps = brute::clustered_points(2, Coord{1} << 16, 256, 5, 3000, rng);
  ps.domain = DomainSpec::make(2, Coord{1} << 16);
  const auto o = build_exact(ps);
  QueryLedger ledger;
  QuerySession s(*o, ledger);
  const auto cfg = preprocess_domain(s, 0.5);
  REQUIRE_FALSE(cfg.identity);
  const EffectiveOracle eo(*o, cfg);
  // snap by hand: floor((x - origin) * Δ' / side)
  std::vector<Point> snapped;
  for (const auto& p : ps.points) {
    Coords e{};
    for (int a = 0; a < 2; ++a)
      e[a] = static_cast<Coord>((static_cast<__int128>(p.x[a] - cfg.origin[a]) * cfg.effective.delta) / cfg.side);
    snapped.push_back(Point{e, Color::plain});
  }
  int bad = 0;
  for (int level = 0; level <= cfg.effective.log_delta(); ++level) {
    const Coord per = cfg.effective.delta >> level;
    for (Coord i = 0; i < per; ++i)
      for (Coord j = 0; j < per; ++j) {
        const auto r = cell_rect(cfg.effective, QuadCell{level, {i, j, 0}}, ShiftVector::zero());
        bad += eo.count(r) != brute::scan_count(snapped, r.lo, r.hi, 2);
      }
  }
  CHECK(bad == 0);
  const auto eff = effective_points(ps, cfg);
  for (std::size_t i = 0; i < ps.points.size(); ++i) CHECK(eff.points[i].x == snapped[i].x);
}

TEST_CASE("exact MST baselines") {
  CHECK(exact_mst(from(2, 8, {{0, 0, 0}, {3, 4, 0}})) == doctest::Approx(5.0));
  CHECK(exact_mst(from(2, 8, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}})) == doctest::Approx(3.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ps = plain(2, 64, 2 + static_cast<std::int64_t>(seed % 6), seed);
    CHECK(exact_mst(ps) == doctest::Approx(brute::exhaustive_mst(locations(ps.points), 2)));
  }
  const auto ps3 = plain(3, 16, 7, 4);
  CHECK(exact_mst(ps3) == doctest::Approx(brute::exhaustive_mst(locations(ps3.points), 3)));
}

TEST_CASE("spanner MST is sandwiched by the exact MST") {
  for (double eps : {0.25, 0.5})
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto ps = plain(2, 256, 150, 40 + seed);
      const double opt = exact_mst(ps);
      const double sp = spanner_mst_exact(ps, eps);
      CHECK(sp >= opt - 1e-9);
      CHECK(sp <= (1 + eps) * opt + 1e-9);
    }
  const auto two = from(2, 1024, {{3, 7, 0}, {900, 15, 0}});
  const double d = euclidean({3, 7, 0}, {900, 15, 0}, 2);
  CHECK(spanner_mst_exact(two, 0.25) >= d - 1e-9);
  CHECK(spanner_mst_exact(two, 0.25) <= 1.25 * d);
}

TEST_CASE("component counts, telescoping sum and contraction safety") {
  for (double eps : {0.25, 0.5}) {
    const auto ps = plain(2, 256, 200, 90);
    const auto sp = build_spanner(ps, eps);
    const int w = mst_levels(ps.domain, eps);
    const auto c = component_counts(sp, eps, w);
    REQUIRE(c.size() == static_cast<std::size_t>(w + 1));
    CHECK(c.back() == 1);
    const auto vertices = static_cast<std::int64_t>(sp.vertices.size());
    CHECK(c[0] <= vertices);
    for (int i = 0; i <= w; ++i) {
      const double radius = level_radius(eps, i);
      const auto lab = labels(sp, radius);
      CHECK(c[static_cast<std::size_t>(i)] == static_cast<std::int64_t>(std::set<int>(lab.begin(), lab.end()).size()));
      CHECK(components_exact(ps, eps, i) == c[static_cast<std::size_t>(i)]);
      // vertices sharing a contraction cell are connected
      const int level = contraction_level(radius, ps.domain);
      std::map<QuadCell, int> seen;
      int bad = 0;
      for (std::size_t v = 0; v < sp.vertices.size(); ++v) {
        const auto cell = cell_of(ps.domain, sp.vertices[v], level, ShiftVector::zero());
        auto [it, fresh] = seen.emplace(cell, lab[v]);
        bad += !fresh && it->second != lab[v];
      }
      CHECK(bad == 0);
    }
    const double tele = telescoping_sum(c, vertices, eps);
    const double mst = spanner_mst(sp);
    CHECK(tele >= mst - 1e-9);
    CHECK(tele <= (1 + eps) * mst + 1e-9);
  }
}

TEST_CASE("levels and contraction grid") {
  const auto dom = DomainSpec::make(2, 1024);
  CHECK(contraction_level(1.0, dom) == 0);
  CHECK(contraction_level(3.9, dom) == 0);
  CHECK(contraction_level(4.0, dom) == 0);
  CHECK(contraction_level(8.0, dom) == 1);
  CHECK(contraction_level(31.0, dom) == 2);
  for (double r = 4; r < 2048; r *= 1.3) {
    const double side = std::ldexp(1.0, contraction_level(r, dom));
    CHECK(side <= r / 4);
    CHECK(side > r / 8);
  }
  const int w = mst_levels(dom, 0.25);
  CHECK(level_radius(0.25, w) >= 2048);
  CHECK(level_radius(0.25, w - 1) < 2048);
}

TEST_CASE("neighbor cells match the explicit spanner") {
  for (EdgeLength len : {EdgeLength::center, EdgeLength::representative})
    for (double eps : {0.25, 0.5}) {
      const auto ps = plain(2, 128, 120, 61);
      const auto sp = build_spanner(ps, eps, len);
      const auto o = build_exact(ps);
      QueryLedger ledger;
      QuerySession s(*o, ledger, true);
      NeighborFinder finder(s, eps, len);
      int bad = 0, nonempty = 0;
      for (int level = 0; level <= 5; ++level)
        for (double r : {2.0, 6.0, 20.0, 70.0}) {
          std::map<QuadCell, std::set<QuadCell>> want;
          for (const auto& e : sp.edges) {
            if (e.length > r) continue;
            const auto a = cell_of(ps.domain, sp.vertices[static_cast<std::size_t>(e.u)], level, ShiftVector::zero());
            const auto b = cell_of(ps.domain, sp.vertices[static_cast<std::size_t>(e.v)], level, ShiftVector::zero());
            if (a == b) continue;
            want[a].insert(b);
            want[b].insert(a);
          }
          std::set<QuadCell> cells;
          for (const auto& p : ps.points) cells.insert(cell_of(ps.domain, p.x, level, ShiftVector::zero()));
          for (const auto& c : cells) {
            const auto got = finder.neighbors(c, r);
            nonempty += !got.empty();
            bad += std::set<QuadCell>(got.begin(), got.end()) != want[c];
          }
        }
      CHECK(bad == 0);
      CHECK(nonempty > 0);
    }
  // isolated cell
  const auto iso = from(2, 256, {{1, 1, 0}, {2, 1, 0}, {200, 200, 0}});
  const auto o = build_exact(iso);
  QueryLedger ledger;
  QuerySession s(*o, ledger);
  CHECK(neighbor_cells(s, QuadCell{2, {50, 50, 0}}, 8, 0.5).empty());
  const auto close = neighbor_cells(s, QuadCell{0, {1, 1, 0}}, 2, 0.5);
  REQUIRE(close.size() == 1);
  CHECK(close[0] == QuadCell{0, {2, 1, 0}});
}

TEST_CASE("component estimates: single cell, complete component, accuracy") {
  Rng rng(3);
  {
    PointSet ps = from(2, 64, {});
    for (int i = 0; i < 50; ++i) ps.points.push_back(Point{{7, 9, 0}, Color::plain});
    const auto o = build_exact(ps);
    QueryLedger ledger;
    QuerySession s(*o, ledger);
    for (int i = 0; i < 5; ++i) CHECK(estimate_components(s, i, 0.5, rng).c_hat == doctest::Approx(1.0));
  }
  {
    // at radius 1.5^3 the contracted graph is a triangle, at radius 1 it has no edges
    PointSet ps = from(2, 64, {});
    for (int k = 0; k < 20; ++k)
      for (Coords p : {Coords{10, 10, 0}, Coords{12, 10, 0}, Coords{10, 12, 0}}) ps.points.push_back(Point{p, Color::plain});
    const auto o = build_exact(ps);
    QueryLedger ledger;
    QuerySession s(*o, ledger);
    const auto e = estimate_components(s, 3, 0.5, rng);
    CHECK(e.n_hat == 3);
    CHECK(e.c_hat == doctest::Approx(1.0));
    CHECK(estimate_components(s, 0, 0.5, rng).c_hat == doctest::Approx(3.0));
  }
  const double eps = 0.25;
  const auto ps = plain(2, 512, 300, 12);
  const auto sp = build_spanner(ps, eps);
  const auto c = component_counts(sp, eps, mst_levels(ps.domain, eps));
  const auto o = build_exact(ps);
  int good = 0, total = 0;
  for (int i = 0; i < static_cast<int>(c.size()); i += 3) {
    QueryLedger ledger;
    QuerySession s(*o, ledger);
    const auto e = estimate_components(s, i, eps, rng);
    CHECK(e.threshold == cell_sampling_cap(300));
    CHECK(e.seeds == 128);
    const double ci = static_cast<double>(c[static_cast<std::size_t>(i)]);
    good += std::abs(e.c_hat - ci) <= ci / 2 + e.n_hat / static_cast<double>(e.threshold);
    ++total;
  }
  CHECK(good * 3 >= total * 2);
}

TEST_CASE("MST estimate: two points and a collinear chain") {
  const double eps = 0.25;
  {
    const auto ps = from(2, 4096, {{100, 200, 0}, {3100, 2200, 0}});
    const double d = euclidean({100, 200, 0}, {3100, 2200, 0}, 2);
    int good = 0;
    for (std::uint64_t t = 0; t < 6; ++t) {
      QueryLedger ledger;
      Rng rng(t);
      const auto e = estimate_mst(*build_exact(ps), eps, rng, ledger);
      good += std::abs(e.value / d - 1) <= 2 * eps;
      CHECK(e.queries_used == ledger.total());
    }
    CHECK(good >= 4);
  }
  {
    PointSet ps = from(2, 1024, {});
    for (Coord i = 0; i < 200; ++i) ps.points.push_back(Point{{i * 5, 300, 0}, Color::plain});
    const double opt = exact_mst(ps);
    CHECK(opt == doctest::Approx(995.0));
    int good = 0;
    for (std::uint64_t t = 0; t < 6; ++t) {
      QueryLedger ledger;
      Rng rng(10 + t);
      const auto e = estimate_mst(*build_exact(ps), eps, rng, ledger);
      good += std::abs(e.value / opt - 1) <= 2 * eps;
    }
    CHECK(good >= 4);
  }
  QueryLedger ledger;
  Rng rng(1);
  CHECK_THROWS(estimate_mst(*build_exact(from(2, 8, {{1, 1, 0}})), 0.25, rng, ledger));
  CHECK_THROWS(estimate_mst(*build_exact(from(2, 8, {{1, 1, 0}, {2, 2, 0}})), 0.0, rng, ledger));
}
