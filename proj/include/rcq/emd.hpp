#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/oracle.hpp"
#include "rcq/point_set.hpp"

namespace rcq {

// ---- exact baselines ----

/// Sorted pairing of a 1D instance.
std::int64_t exact_emd_1d(std::span<const Point> red, std::span<const Point> blue);
std::int64_t exact_emd_1d(const PointSet& ps);

inline constexpr std::size_t kExactEmdCap = 2048;

/// Min-cost perfect matching under Euclidean distance (Hungarian, O(n^3)).
double exact_emd(std::span<const Point> red, std::span<const Point> blue, int dim);
double exact_emd(const PointSet& ps);

/// Cost of the greedy quadtree matching under the tree metric, by bucketing
/// every point at every level.
std::int64_t greedy_matching_cost_exact(const PointSet& ps, const ShiftVector& shift);

// ---- greedy matching through the oracle ----

struct CellCounts {
  std::int64_t red = 0, blue = 0;
  std::int64_t surplus_red() const { return red > blue ? red - blue : 0; }
  std::int64_t surplus_blue() const { return blue > red ? blue - red : 0; }
};

/// Red and blue oracle traffic of one estimator run, both charged to the
/// same ledger.
class ColoredSession {
 public:
  ColoredSession(const ColoredOracle& co, QueryLedger& ledger, bool memoize = true);

  CellCounts counts(const QuadCell& c, const ShiftVector& shift);
  QuerySession& of(Color c) { return c == Color::red ? red_ : blue_; }
  const DomainSpec& domain() const { return red_.domain(); }
  std::int64_t n() const { return red_.n(); }
  QueryLedger& ledger() { return red_.ledger(); }

 private:
  QuerySession red_, blue_;
};

struct MateHit {
  Coords location{};
  std::int64_t occurrence = 1;
  /// Level of the cell where the pair was formed.
  int level = 0;
};

/// Partner of the occurrence-th point of `color` at `location` under the
/// greedy bottom-up z-order matching.
MateHit find_mate(ColoredSession& s, const Coords& location, Color color,
                  std::int64_t occurrence, const ShiftVector& shift);
MateHit find_mate(const ColoredOracle& co, const Coords& location, Color color,
                  const ShiftVector& shift, QueryLedger& ledger, std::int64_t occurrence = 1);

/// Unmatched surpluses of every cell at levels >= `cutoff` of one shifted
/// quadtree.
struct GreedyMatchProfile {
  int cutoff = 0;
  int dim = 2;
  /// levels[j - cutoff] maps each non-empty cell at level j to its counts.
  std::vector<std::unordered_map<QuadCell, CellCounts, QuadCellHash>> levels;

  /// Points paired inside `c`: min of the children's red and blue surpluses.
  std::int64_t matched_in(const QuadCell& c) const;
  /// Total tree length of the pairs formed at levels above the cutoff.
  std::int64_t long_cost() const;
};

GreedyMatchProfile build_profile(ColoredSession& s, int cutoff, const ShiftVector& shift);

struct EdgeClassEstimates {
  /// ell[i] for i = 1..t (index 0 unused).
  std::vector<double> ell;
  int t = 0;
  std::int64_t sample_size = 0;

  double weighted_sum() const;
};

struct EmdConfig {
  /// 0 selects ceil(log2 Δ).
  int class_reps = 0;
  int shift_reps = 0;
  double sample_factor = 1.0;
};

int default_reps(const DomainSpec& dom);
std::int64_t emd_sample_size(std::int64_t s, const DomainSpec& dom, double factor);

Estimate estimate_emd_1d(const ColoredOracle& co, std::int64_t s, Rng& rng, QueryLedger& ledger,
                         const EmdConfig& cfg = {});
Estimate estimate_emd(const ColoredOracle& co, std::int64_t s, Rng& rng, QueryLedger& ledger,
                      const EmdConfig& cfg = {});

/// Level below which greedy pairs are sampled rather than counted.
int emd_cutoff_level(const DomainSpec& dom, std::int64_t s);

}  // namespace rcq
