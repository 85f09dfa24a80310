#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/oracle.hpp"
#include "rcq/point_set.hpp"
#include "rcq/wspd.hpp"

namespace rcq {

/// How long the spanner edge of a pair (a, b) is.
enum class EdgeLength { center, representative };

struct SpannerConfig {
  double eps = 0.25;
  DomainSpec original;
  DomainSpec effective;
  Coords origin{};
  /// Side of the bounding square in original units.
  Coord side = 1;
  bool identity = true;
  /// Original length of one effective unit.
  double scale_factor = 1.0;

  Coords to_effective(const Coords& p) const;
  /// Original-coordinate range holding exactly the points that land in `r`.
  Rect to_original(const Rect& r) const;
};

SpannerConfig make_spanner_config(const DomainSpec& original, const Rect& square, std::int64_t n,
                                  double eps);
/// Bounding square by binary search, then the effective grid.
SpannerConfig preprocess_domain(QuerySession& s, double eps);

/// Counts in effective coordinates, answered by one original query each.
class EffectiveOracle final : public RangeCountOracle {
 public:
  EffectiveOracle(const RangeCountOracle& inner, SpannerConfig cfg);
  std::int64_t count(const Rect& q) const override;
  std::int64_t n() const override { return inner_.n(); }
  const DomainSpec& domain() const override { return cfg_.effective; }
  const SpannerConfig& config() const { return cfg_; }

 private:
  const RangeCountOracle& inner_;
  SpannerConfig cfg_;
};

PointSet effective_points(const PointSet& ps, const SpannerConfig& cfg);

/// Lexicographically smallest point of a non-empty cell.
Coords representative(QuerySession& s, const QuadCell& cell);

double edge_length(const WspdPair& p, const Coords& rep_a, const Coords& rep_b, EdgeLength len,
                   int dim);

/// (1+eps)^i.
double level_radius(double eps, int i);
/// Level whose side lies in (radius/8, radius/4]; 0 below radius 4.
int contraction_level(double radius, const DomainSpec& dom);
/// Smallest w with (1+eps)^w >= 2Δ.
int mst_levels(const DomainSpec& dom, double eps);

/// Spanner traversal through the oracle with cached representatives.
class NeighborFinder {
 public:
  NeighborFinder(QuerySession& s, double eps, EdgeLength len = EdgeLength::representative);

  /// Cells at the level of `x` joined to `x` by a spanner edge of length at
  /// most `r`. Exact with respect to the spanner built from the full
  /// decomposition.
  std::vector<QuadCell> neighbors(const QuadCell& x, double r);
  const Coords& rep(const QuadCell& c);
  QuerySession& session() { return s_; }

 private:
  QuerySession& s_;
  double eps_;
  EdgeLength len_;
  std::unordered_map<QuadCell, Coords, QuadCellHash> reps_;
};

std::vector<QuadCell> neighbor_cells(QuerySession& s, const QuadCell& c, double r, double eps,
                                     EdgeLength len = EdgeLength::representative);

struct MstConfig {
  EdgeLength length = EdgeLength::representative;
  /// 0 selects ceil(8/eps^2).
  int seeds = 0;
  /// 0 selects ceil(log2 Δ') repetitions, combined by median.
  int reps = 0;
};

struct ComponentEstimate {
  int level = 0;
  double c_hat = 0.0;
  int seeds = 0;
  std::int64_t threshold = 0;
  double n_hat = 0.0;
};

/// Component count of the spanner subgraph with edges <= (1+eps)^i, run on
/// an effective-coordinate session.
ComponentEstimate estimate_components(QuerySession& s, int i, double eps, Rng& rng,
                                      const MstConfig& cfg = {});

Estimate estimate_mst(const RangeCountOracle& o, double eps, Rng& rng, QueryLedger& ledger,
                      const MstConfig& cfg = {});

// ---- exact baselines ----

inline constexpr std::size_t kExactMstCap = 1 << 17;
inline constexpr std::size_t kSpannerCap = 4096;

/// Prim on the complete Euclidean graph.
double exact_mst(std::span<const Point> pts, int dim);
double exact_mst(const PointSet& ps);

struct Spanner {
  struct Edge {
    std::int32_t u = 0, v = 0;
    double length = 0.0;
  };
  int dim = 2;
  /// Distinct locations.
  std::vector<Coords> vertices;
  std::vector<Edge> edges;
  std::vector<WspdPair> pairs;
};

Spanner build_spanner(const PointSet& ps, double eps, EdgeLength len = EdgeLength::representative);
double spanner_mst(const Spanner& sp);
double spanner_mst_exact(const PointSet& ps, double eps, EdgeLength len = EdgeLength::representative);

/// Components of the subgraph with edges of length <= (1+eps)^i, for every
/// i in 0..w.
std::vector<std::int64_t> component_counts(const Spanner& sp, double eps, int w);
std::int64_t components_exact(const PointSet& ps, double eps, int i,
                              EdgeLength len = EdgeLength::representative);

/// Sum over i = 0..w of (1+eps)^i (c_{i-1} - c_i), with c_{-1} the vertex
/// count.
double telescoping_sum(std::span<const std::int64_t> c, std::int64_t vertices, double eps);

}  // namespace rcq
