#pragma once

#include <cstdint>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/oracle.hpp"

namespace rcq {

struct Enumeration {
  std::vector<QuadCell> cells;  // in z-order of the unshifted quadtree
  bool overflow = false;
};

/// Non-empty cells of the unshifted grid at `level`, found by descending
/// only into non-empty subtrees. Stops with overflow as soon as more than
/// `cap` cells are confirmed.
Enumeration enumerate_nonempty(QuerySession& s, int level, std::int64_t cap);

enum class CellBranch { enumerated, weighted };

struct CellSample {
  QuadCell cell;
  double weight_sum = 0.0;   // m'
  std::int64_t sample_size = 0;  // x
  CellBranch branch = CellBranch::enumerated;
};

/// Almost-uniform sampler over the non-empty cells of one grid level.
///
/// Construction does the query work once: it tries to enumerate up to
/// ceil(sqrt n) non-empty cells and otherwise draws x = ceil(sqrt(n) log2 n)
/// uniform points (with replacement), weighting each by n / (x n_p) where
/// n_p is the population of its cell. draw() then costs no queries, so many
/// seeds can share one preparation.
class CellSampler {
 public:
  CellSampler(QuerySession& s, int level, Rng& rng);

  QuadCell draw(Rng& rng) const;
  /// Exact m on the enumerated branch, m' otherwise.
  double estimate() const;
  CellBranch branch() const { return branch_; }
  std::int64_t sample_size() const { return static_cast<std::int64_t>(cells_.size()); }
  std::int64_t cap() const { return cap_; }

 private:
  CellBranch branch_ = CellBranch::enumerated;
  std::int64_t cap_ = 0;
  std::vector<QuadCell> cells_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double weight_sum_ = 0.0;
};

std::int64_t cell_sampling_cap(std::int64_t n);
std::int64_t cell_sampling_size(std::int64_t n);

/// One call of the sampling procedure for grid side r (a power of two).
CellSample cell_sampling(QuerySession& s, Coord r, Rng& rng);

/// Non-empty-cell count: exact when enumeration succeeds, m' otherwise.
Estimate estimate_nonempty_count(const RangeCountOracle& o, Coord r, Rng& rng,
                                 QueryLedger& ledger);

}  // namespace rcq
