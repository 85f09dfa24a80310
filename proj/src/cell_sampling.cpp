#include "rcq/cell_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcq/primitives.hpp"

namespace rcq {

namespace {

void descend(QuerySession& s, const QuadCell& cell, int level, std::int64_t cap, Enumeration& out) {
  if (out.overflow) return;
  if (cell.level == level) {
    out.cells.push_back(cell);
    if (static_cast<std::int64_t>(out.cells.size()) > cap) out.overflow = true;
    return;
  }
  for (const auto& child : children(cell, s.domain().dim)) {
    if (s.count(cell_rect(s.domain(), child, ShiftVector::zero())) > 0)
      descend(s, child, level, cap, out);
    if (out.overflow) return;
  }
}

int level_of_side(const DomainSpec& dom, Coord r) {
  if (r < 1 || r > dom.delta || (r & (r - 1)) != 0)
    throw std::invalid_argument("cell side must be a power of two in [1, delta]");
  return floor_log2(r);
}

}  // namespace

Enumeration enumerate_nonempty(QuerySession& s, int level, std::int64_t cap) {
  const auto& dom = s.domain();
  if (level < 0 || level > dom.root_level()) throw std::out_of_range("grid level out of range");
  Enumeration out;
  const QuadCell root = root_cell(dom);
  if (s.count(cell_rect(dom, root, ShiftVector::zero())) == 0) return out;
  descend(s, root, level, cap, out);
  return out;
}

std::int64_t cell_sampling_cap(std::int64_t n) {
  return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

std::int64_t cell_sampling_size(std::int64_t n) {
  if (n <= 1) return 1;
  const double nn = static_cast<double>(n);
  return static_cast<std::int64_t>(std::ceil(std::sqrt(nn) * std::log2(nn)));
}

CellSampler::CellSampler(QuerySession& s, int level, Rng& rng) {
  const std::int64_t n = s.n();
  if (n < 1) throw std::invalid_argument("cell sampling needs a non-empty point set");
  cap_ = cell_sampling_cap(n);
  auto en = enumerate_nonempty(s, level, cap_);
  if (!en.overflow) {
    branch_ = CellBranch::enumerated;
    cells_ = std::move(en.cells);
    weights_.assign(cells_.size(), 1.0);
    weight_sum_ = static_cast<double>(cells_.size());
  } else {
    branch_ = CellBranch::weighted;
    const std::int64_t x = cell_sampling_size(n);
    const auto& dom = s.domain();
    cells_.reserve(static_cast<std::size_t>(x));
    weights_.reserve(static_cast<std::size_t>(x));
    for (std::int64_t j = 0; j < x; ++j) {
      const Coords p = sample_uniform(s, rng);
      const QuadCell c = cell_of(dom, p, level, ShiftVector::zero());
      const std::int64_t np = s.count(cell_rect(dom, c, ShiftVector::zero()));
      const double w = static_cast<double>(n) / (static_cast<double>(x) * static_cast<double>(np));
      cells_.push_back(c);
      weights_.push_back(w);
      weight_sum_ += w;
    }
  }
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) cumulative_[i] = (acc += weights_[i]);
}

QuadCell CellSampler::draw(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, weight_sum_);
  const double target = u(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return cells_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double CellSampler::estimate() const { return weight_sum_; }

CellSample cell_sampling(QuerySession& s, Coord r, Rng& rng) {
  const int level = level_of_side(s.domain(), r);
  CellSampler sampler(s, level, rng);
  CellSample out;
  out.cell = sampler.draw(rng);
  out.weight_sum = sampler.estimate();
  out.sample_size = sampler.branch() == CellBranch::weighted ? sampler.sample_size() : 0;
  out.branch = sampler.branch();
  return out;
}

Estimate estimate_nonempty_count(const RangeCountOracle& o, Coord r, Rng& rng,
                                 QueryLedger& ledger) {
  const auto before = ledger.per_phase();
  const auto start = ledger.total();
  QueryLedger::Phase phase(ledger, "count-cells");
  QuerySession s(o, ledger);
  const int level = level_of_side(o.domain(), r);
  CellSampler sampler(s, level, rng);
  Estimate e;
  e.value = sampler.estimate();
  e.queries_used = ledger.total() - start;
  e.params["r"] = static_cast<double>(r);
  e.params["cap"] = static_cast<double>(sampler.cap());
  e.params["weighted_branch"] = sampler.branch() == CellBranch::weighted ? 1.0 : 0.0;
  e.params["sample_size"] =
      sampler.branch() == CellBranch::weighted ? static_cast<double>(sampler.sample_size()) : 0.0;
  e.phase_breakdown = phase_delta(before, ledger.per_phase());
  return e;
}

}  // namespace rcq
