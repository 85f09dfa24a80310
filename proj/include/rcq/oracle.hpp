#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rcq/geometry.hpp"
#include "rcq/point_set.hpp"

namespace rcq {

/// Black-box access to a hidden point multiset: the only thing an
/// estimator may ask is how many points fall in a Rect.
class RangeCountOracle {
 public:
  virtual ~RangeCountOracle() = default;
  virtual std::int64_t count(const Rect& q) const = 0;
  virtual std::int64_t n() const = 0;
  virtual const DomainSpec& domain() const = 0;
};

/// Reference oracle. Uses a dense prefix-sum table when Δ^d is small and a
/// count-annotated k-d tree otherwise. Multiset semantics.
class ExactOracle final : public RangeCountOracle {
 public:
  ExactOracle(const DomainSpec& dom, std::span<const Point> points);

  std::int64_t count(const Rect& q) const override;
  std::int64_t n() const override { return n_; }
  const DomainSpec& domain() const override { return dom_; }

  static constexpr std::int64_t kDenseLimit = std::int64_t{1} << 22;

 private:
  struct Node {
    Coords lo{}, hi{};
    std::int64_t count = 0;
    std::int32_t left = -1, right = -1;
    std::uint32_t begin = 0, end = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  std::int64_t count_dense(const Rect& q) const;
  std::int64_t count_tree(std::int32_t node, const Rect& q) const;

  DomainSpec dom_;
  std::int64_t n_ = 0;
  bool dense_ = false;
  std::vector<std::int32_t> prefix_;
  std::vector<Coords> pts_;
  std::vector<Node> nodes_;
};

std::shared_ptr<const ExactOracle> build_exact(const PointSet& ps);
std::shared_ptr<const ExactOracle> build_exact(const PointSet& ps, Color color);

/// Red and blue views over the same domain.
struct ColoredOracle {
  std::shared_ptr<const RangeCountOracle> red;
  std::shared_ptr<const RangeCountOracle> blue;

  const DomainSpec& domain() const { return red->domain(); }
  std::int64_t n() const { return red->n(); }
};

/// Requires |R| = |B|.
ColoredOracle build_colored(const PointSet& ps);

/// Cumulative query counter with labeled phases. total() always equals the
/// sum of the phase counters.
class QueryLedger {
 public:
  void charge(std::int64_t k = 1);
  std::int64_t total() const { return total_; }
  const std::map<std::string, std::int64_t>& per_phase() const { return per_phase_; }
  const std::string& phase() const { return phase_; }

  /// Scoped phase label; restores the previous label on exit.
  class Phase {
   public:
    Phase(QueryLedger& ledger, std::string name);
    ~Phase();
    Phase(const Phase&) = delete;
    Phase& operator=(const Phase&) = delete;

   private:
    QueryLedger& ledger_;
    std::string saved_;
  };

 private:
  std::int64_t total_ = 0;
  std::map<std::string, std::int64_t> per_phase_;
  std::string phase_ = "main";
};

/// One counted query.
std::int64_t count(const RangeCountOracle& o, const Rect& q, QueryLedger& ledger);

/// All oracle traffic of one estimator run. With memoization on, a repeated
/// query is answered from the run's own record and is not charged again.
/// Empty rects are answered locally and never charged.
class QuerySession {
 public:
  QuerySession(const RangeCountOracle& oracle, QueryLedger& ledger, bool memoize = false);

  std::int64_t count(const Rect& q);
  std::int64_t n() const { return oracle_->n(); }
  const DomainSpec& domain() const { return oracle_->domain(); }
  QueryLedger& ledger() { return *ledger_; }
  const RangeCountOracle& oracle() const { return *oracle_; }

 private:
  const RangeCountOracle* oracle_;
  QueryLedger* ledger_;
  bool memoize_;
  std::unordered_map<Rect, std::int64_t, RectHash> memo_;
};

struct Estimate {
  double value = 0.0;
  std::int64_t queries_used = 0;
  std::map<std::string, double> params;
  std::map<std::string, std::int64_t> phase_breakdown;
};

/// Per-phase delta between two ledger snapshots.
std::map<std::string, std::int64_t> phase_delta(const std::map<std::string, std::int64_t>& before,
                                                const std::map<std::string, std::int64_t>& after);

nlohmann::ordered_json to_json(const Estimate& e);

}  // namespace rcq
