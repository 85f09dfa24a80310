#include "rcq/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcq/primitives.hpp"

namespace rcq {

ColoredSession::ColoredSession(const ColoredOracle& co, QueryLedger& ledger, bool memoize)
    : red_(*co.red, ledger, memoize), blue_(*co.blue, ledger, memoize) {
  if (co.red->n() != co.blue->n()) throw std::invalid_argument("red and blue sets differ in size");
}

CellCounts ColoredSession::counts(const QuadCell& c, const ShiftVector& shift) {
  const Rect r = cell_rect(domain(), c, shift);
  return CellCounts{red_.count(r), blue_.count(r)};
}

namespace {

std::int64_t n_of(const CellCounts& cc, Color c) { return c == Color::red ? cc.red : cc.blue; }
std::int64_t surplus_of(const CellCounts& cc, Color c) {
  return c == Color::red ? cc.surplus_red() : cc.surplus_blue();
}
Color opposite(Color c) { return c == Color::red ? Color::blue : Color::red; }

}  // namespace

MateHit find_mate(ColoredSession& s, const Coords& location, Color color,
                  std::int64_t occurrence, const ShiftVector& shift) {
  if (color == Color::plain) throw std::invalid_argument("find_mate needs a colored point");
  const auto& dom = s.domain();
  const Color other = opposite(color);

  QuadCell cell = cell_of(dom, location, 0, shift);
  CellCounts cc = s.counts(cell, shift);
  if (occurrence < 1 || occurrence > n_of(cc, color))
    throw std::invalid_argument("no such point at this location");
  if (occurrence <= n_of(cc, other)) return MateHit{location, occurrence, 0};
  std::int64_t k = occurrence - n_of(cc, other);

  while (cell.level < dom.root_level()) {
    const QuadCell par = parent(cell);
    auto kids = children(par, dom.dim);
    std::vector<CellCounts> kc(kids.size());
    std::int64_t before = 0, own_total = 0, other_total = 0;
    bool passed = false;
    CellCounts sum;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i] == cell) {
        kc[i] = cc;
        passed = true;
      } else {
        kc[i] = s.counts(kids[i], shift);
        if (!passed) before += surplus_of(kc[i], color);
      }
      own_total += surplus_of(kc[i], color);
      other_total += surplus_of(kc[i], other);
      sum.red += kc[i].red;
      sum.blue += kc[i].blue;
    }
    std::int64_t rank = before + k;
    const std::int64_t paired = std::min(own_total, other_total);
    if (rank > paired) {
      k = rank - paired;
      cell = par;
      cc = sum;
      continue;
    }

    // The rank-th unmatched point of the other color entering `par`.
    for (;;) {
      std::size_t i = 0;
      for (; i < kids.size(); ++i) {
        const std::int64_t so = surplus_of(kc[i], other);
        if (rank <= so) break;
        rank -= so;
      }
      if (i == kids.size()) throw std::logic_error("find_mate: inconsistent counts");
      const QuadCell child = kids[i];
      if (child.level == 0)
        return MateHit{cell_rect(dom, child, shift).lo, n_of(kc[i], color) + rank, par.level};
      kids = children(child, dom.dim);
      kc.assign(kids.size(), CellCounts{});
      std::int64_t o = 0, t = 0;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        kc[j] = s.counts(kids[j], shift);
        o += surplus_of(kc[j], color);
        t += surplus_of(kc[j], other);
      }
      rank += std::min(o, t);
    }
  }
  throw std::logic_error("find_mate: point left unmatched at the root");
}

MateHit find_mate(const ColoredOracle& co, const Coords& location, Color color,
                  const ShiftVector& shift, QueryLedger& ledger, std::int64_t occurrence) {
  ColoredSession s(co, ledger, false);
  return find_mate(s, location, color, occurrence, shift);
}

std::int64_t GreedyMatchProfile::matched_in(const QuadCell& c) const {
  if (c.level <= cutoff) throw std::out_of_range("matched_in below the profile cutoff");
  const auto& below = levels[static_cast<std::size_t>(c.level - 1 - cutoff)];
  std::int64_t r = 0, b = 0;
  for (const auto& kid : children(c, dim)) {
    auto it = below.find(kid);
    if (it == below.end()) continue;
    r += it->second.surplus_red();
    b += it->second.surplus_blue();
  }
  return std::min(r, b);
}

std::int64_t GreedyMatchProfile::long_cost() const {
  std::int64_t total = 0;
  for (std::size_t li = 1; li < levels.size(); ++li) {
    const int level = cutoff + static_cast<int>(li);
    const auto& below = levels[li - 1];
    // Sum the children's surpluses into their parents.
    std::unordered_map<QuadCell, std::pair<std::int64_t, std::int64_t>, QuadCellHash> up;
    for (const auto& [cell, cc] : below) {
      auto& acc = up[parent(cell)];
      acc.first += cc.surplus_red();
      acc.second += cc.surplus_blue();
    }
    for (const auto& [cell, acc] : up)
      total += std::min(acc.first, acc.second) * tree_length_at_level(level);
  }
  return total;
}

GreedyMatchProfile build_profile(ColoredSession& s, int cutoff, const ShiftVector& shift) {
  const auto& dom = s.domain();
  if (cutoff < 0 || cutoff > dom.root_level()) throw std::out_of_range("profile cutoff");
  GreedyMatchProfile prof;
  prof.cutoff = cutoff;
  prof.dim = dom.dim;
  prof.levels.resize(static_cast<std::size_t>(dom.root_level() - cutoff + 1));

  Coords first{}, last{};
  for (int k = 0; k < dom.dim; ++k) {
    first[k] = shift.v[k] >> cutoff;
    last[k] = (dom.delta - 1 + shift.v[k]) >> cutoff;
  }
  auto& base = prof.levels[0];
  QuadCell c;
  c.level = cutoff;
  for (Coord i0 = first[0]; i0 <= last[0]; ++i0)
    for (Coord i1 = first[1]; i1 <= last[1]; ++i1)
      for (Coord i2 = first[2]; i2 <= last[2]; ++i2) {
        c.index = Coords{i0, i1, i2};
        const CellCounts cc = s.counts(c, shift);
        if (cc.red || cc.blue) base.emplace(c, cc);
      }
  for (std::size_t li = 1; li < prof.levels.size(); ++li) {
    for (const auto& [cell, cc] : prof.levels[li - 1]) {
      auto& acc = prof.levels[li][parent(cell)];
      acc.red += cc.red;
      acc.blue += cc.blue;
    }
  }
  return prof;
}

double EdgeClassEstimates::weighted_sum() const {
  double total = 0.0;
  for (int i = 1; i < static_cast<int>(ell.size()); ++i) total += std::ldexp(ell[i], i);
  return total;
}

int default_reps(const DomainSpec& dom) { return std::max(1, dom.log_delta()); }

std::int64_t emd_sample_size(std::int64_t s, const DomainSpec& dom, double factor) {
  const double lg = std::max(1, dom.log_delta());
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(factor * s * lg * lg)));
}

int emd_cutoff_level(const DomainSpec& dom, std::int64_t s) {
  const double v = dom.log_delta() - std::log2(static_cast<double>(s)) / dom.dim;
  const int level = static_cast<int>(std::ceil(v - 1e-9));
  return std::clamp(level, 0, dom.root_level());
}

namespace {

/// Per-class minimum over repetitions of the scaled class counts.
template <class Draw>
EdgeClassEstimates sample_classes(int t, std::int64_t x, int reps, std::int64_t n, Draw&& draw) {
  EdgeClassEstimates est;
  est.t = t;
  est.sample_size = x;
  est.ell.assign(static_cast<std::size_t>(t + 1), std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> hits(static_cast<std::size_t>(t + 1));
  const double scale = static_cast<double>(n) / static_cast<double>(x);
  for (int rep = 0; rep < reps; ++rep) {
    std::fill(hits.begin(), hits.end(), 0);
    for (std::int64_t j = 0; j < x; ++j) {
      const int cls = draw();
      if (cls >= 1 && cls <= t) ++hits[static_cast<std::size_t>(cls)];
    }
    for (int i = 1; i <= t; ++i)
      est.ell[i] = std::min(est.ell[i], static_cast<double>(hits[i]) * scale);
  }
  if (reps == 0) std::fill(est.ell.begin(), est.ell.end(), 0.0);
  est.ell[0] = 0.0;
  return est;
}

void check_s(std::int64_t s, std::int64_t lo, std::int64_t n) {
  if (s < lo || s > std::max(lo, n)) throw std::invalid_argument("s out of range");
}

}  // namespace

Estimate estimate_emd_1d(const ColoredOracle& co, std::int64_t s, Rng& rng, QueryLedger& ledger,
                         const EmdConfig& cfg) {
  const auto& dom = co.domain();
  if (dom.dim != 1) throw std::invalid_argument("estimate_emd_1d needs a 1D instance");
  const std::int64_t n = co.n();
  check_s(s, 1, n);
  const auto before = ledger.per_phase();
  const auto start = ledger.total();
  ColoredSession cs(co, ledger, true);

  Estimate e;
  e.params["s"] = static_cast<double>(s);
  if (n == 0) {
    e.queries_used = 0;
    return e;
  }

  // Long part: snapped per-segment counts, sorted matching offline.
  double long_part = 0.0;
  {
    QueryLedger::Phase phase(ledger, "long");
    const Coord delta = dom.delta;
    const std::int64_t segs = std::min<std::int64_t>(2 * s, delta);
    std::vector<Coord> bound(static_cast<std::size_t>(segs + 1));
    for (std::int64_t j = 0; j <= segs; ++j) bound[j] = j * delta / segs;
    std::vector<std::int64_t> red(segs), blue(segs);
    std::vector<double> center(segs);
    for (std::int64_t j = 0; j < segs; ++j) {
      const Rect r = Rect::clipped(dom, Coords{bound[j]}, Coords{bound[j + 1] - 1});
      red[j] = cs.of(Color::red).count(r);
      blue[j] = cs.of(Color::blue).count(r);
      center[j] = static_cast<double>(bound[j] + bound[j + 1] - 1) / 2.0;
    }
    std::int64_t i = 0, j = 0, ri = 0, bj = 0;
    while (true) {
      while (i < segs && ri == red[i] ) { ++i; ri = 0; }
      while (j < segs && bj == blue[j]) { ++j; bj = 0; }
      if (i >= segs || j >= segs) break;
      const std::int64_t take = std::min(red[i] - ri, blue[j] - bj);
      if (i != j) long_part += static_cast<double>(take) * std::abs(center[i] - center[j]);
      ri += take;
      bj += take;
    }
    e.params["segments"] = static_cast<double>(segs);
  }

  // Short part: rank-matched samples bucketed by length.
  const int t = std::max(1, static_cast<int>(std::ceil(
                                std::log2(static_cast<double>(dom.delta) / static_cast<double>(s)) -
                                1e-9)));
  const std::int64_t x = emd_sample_size(s, dom, cfg.sample_factor);
  const int reps = cfg.class_reps > 0 ? cfg.class_reps : default_reps(dom);
  EdgeClassEstimates classes;
  {
    QueryLedger::Phase phase(ledger, "short");
    std::unordered_map<std::int64_t, int> seen;
    std::uniform_int_distribution<std::int64_t> pick(1, n);
    const Rect full = Rect::full(dom);
    classes = sample_classes(t, x, reps, n, [&]() {
      const std::int64_t k = pick(rng);
      auto it = seen.find(k);
      if (it != seen.end()) return it->second;
      const Coord r = kth_lex(cs.of(Color::red), full, k)[0];
      const Coord b = kth_lex(cs.of(Color::blue), full, k)[0];
      const Coord len = r > b ? r - b : b - r;
      const int cls = len == 0 ? 0 : floor_log2(len) + 1;
      seen.emplace(k, cls);
      return cls;
    });
  }

  e.value = classes.weighted_sum() + long_part;
  e.queries_used = ledger.total() - start;
  e.params["t"] = t;
  e.params["sample_size"] = static_cast<double>(x);
  e.params["class_reps"] = reps;
  e.params["long_part"] = long_part;
  e.params["short_part"] = classes.weighted_sum();
  e.phase_breakdown = phase_delta(before, ledger.per_phase());
  return e;
}

Estimate estimate_emd(const ColoredOracle& co, std::int64_t s, Rng& rng, QueryLedger& ledger,
                      const EmdConfig& cfg) {
  const auto& dom = co.domain();
  const std::int64_t n = co.n();
  check_s(s, 2, n);
  const auto before = ledger.per_phase();
  const auto start = ledger.total();
  ColoredSession cs(co, ledger, true);

  const int cutoff = emd_cutoff_level(dom, s);
  const int t = cutoff + 2;
  const std::int64_t x = emd_sample_size(s, dom, cfg.sample_factor);
  const int reps = cfg.class_reps > 0 ? cfg.class_reps : default_reps(dom);
  const int shifts = cfg.shift_reps > 0 ? cfg.shift_reps : default_reps(dom);

  Estimate e;
  e.params["s"] = static_cast<double>(s);
  e.params["cutoff_level"] = cutoff;
  e.params["t"] = t;
  e.params["sample_size"] = static_cast<double>(x);
  e.params["class_reps"] = reps;
  e.params["shift_reps"] = shifts;
  if (n == 0) return e;

  std::unordered_map<std::int64_t, LexHit> samples;
  std::uniform_int_distribution<std::int64_t> pick(1, n);
  const Rect full = Rect::full(dom);
  double best = std::numeric_limits<double>::infinity();
  double best_long = 0.0, best_short = 0.0;
  for (int sh = 0; sh < shifts; ++sh) {
    const ShiftVector shift = ShiftVector::random(dom, rng());
    std::int64_t long_part = 0;
    {
      QueryLedger::Phase phase(ledger, "long");
      long_part = build_profile(cs, cutoff, shift).long_cost();
    }
    EdgeClassEstimates classes;
    {
      QueryLedger::Phase phase(ledger, "short");
      std::unordered_map<std::int64_t, int> mate_level;
      classes = sample_classes(t, x, reps, n, [&]() {
        const std::int64_t k = pick(rng);
        if (auto it = mate_level.find(k); it != mate_level.end()) return it->second;
        auto sit = samples.find(k);
        if (sit == samples.end())
          sit = samples.emplace(k, kth_lex_hit(cs.of(Color::red), full, k)).first;
        const MateHit m = find_mate(cs, sit->second.location, Color::red, sit->second.occurrence, shift);
        // Tree length 2^{j+2}-4 falls in class j+2.
        const int cls = (m.level == 0 || m.level > cutoff) ? 0 : m.level + 2;
        mate_level.emplace(k, cls);
        return cls;
      });
    }
    const double total = static_cast<double>(long_part) + classes.weighted_sum();
    if (total < best) {
      best = total;
      best_long = static_cast<double>(long_part);
      best_short = classes.weighted_sum();
    }
  }
  e.value = best;
  e.queries_used = ledger.total() - start;
  e.params["long_part"] = best_long;
  e.params["short_part"] = best_short;
  e.phase_breakdown = phase_delta(before, ledger.per_phase());
  return e;
}

}  // namespace rcq
