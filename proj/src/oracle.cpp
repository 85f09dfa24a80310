#include "rcq/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace rcq {

namespace {

constexpr std::uint32_t kLeafSize = 8;

std::int64_t dense_size(const DomainSpec& dom) {
  std::int64_t s = 1;
  for (int k = 0; k < dom.dim; ++k) s *= (dom.delta + 1);
  return s;
}

}  // namespace

ExactOracle::ExactOracle(const DomainSpec& dom, std::span<const Point> points)
    : dom_(dom), n_(static_cast<std::int64_t>(points.size())) {
  for (const auto& p : points)
    if (!dom_.contains(p.x)) throw std::invalid_argument("point outside the domain");

  std::int64_t cells = 1;
  for (int k = 0; k < dom_.dim; ++k) cells *= dom_.delta;
  dense_ = cells <= kDenseLimit;

  if (dense_) {
    const std::int64_t side = dom_.delta + 1;
    prefix_.assign(static_cast<std::size_t>(dense_size(dom_)), 0);
    auto at = [&](Coord x, Coord y, Coord z) { return (z * side + y) * side + x; };
    for (const auto& p : points) {
      const Coord y = dom_.dim > 1 ? p.x[1] + 1 : 0;
      const Coord z = dom_.dim > 2 ? p.x[2] + 1 : 0;
      ++prefix_[static_cast<std::size_t>(at(p.x[0] + 1, y, z))];
    }
    // Running sums along each axis in turn.
    const Coord ny = dom_.dim > 1 ? side : 1;
    const Coord nz = dom_.dim > 2 ? side : 1;
    for (int axis = 0; axis < dom_.dim; ++axis) {
      for (Coord z = 0; z < nz; ++z)
        for (Coord y = 0; y < ny; ++y)
          for (Coord x = 0; x < side; ++x) {
            Coord px = x, py = y, pz = z;
            if (axis == 0) px = x - 1;
            if (axis == 1) py = y - 1;
            if (axis == 2) pz = z - 1;
            if (px < 0 || py < 0 || pz < 0) continue;
            prefix_[static_cast<std::size_t>(at(x, y, z))] +=
                prefix_[static_cast<std::size_t>(at(px, py, pz))];
          }
    }
  } else {
    pts_.reserve(points.size());
    for (const auto& p : points) pts_.push_back(p.x);
    if (!pts_.empty()) build(0, static_cast<std::uint32_t>(pts_.size()), 0);
  }
}

std::int32_t ExactOracle::build(std::uint32_t begin, std::uint32_t end, int depth) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.count = end - begin;
  node.lo = node.hi = pts_[begin];
  for (std::uint32_t i = begin; i < end; ++i)
    for (int k = 0; k < dom_.dim; ++k) {
      node.lo[k] = std::min(node.lo[k], pts_[i][k]);
      node.hi[k] = std::max(node.hi[k], pts_[i][k]);
    }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  Coord spread = -1;
  for (int k = 0; k < dom_.dim; ++k)
    if (node.hi[k] - node.lo[k] > spread) {
      spread = node.hi[k] - node.lo[k];
      axis = k;
    }
  if (spread == 0) return id;  // all coincident
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(pts_.begin() + begin, pts_.begin() + mid, pts_.begin() + end,
                   [axis](const Coords& a, const Coords& b) { return a[axis] < b[axis]; });
  const auto l = build(begin, mid, depth + 1);
  const auto r = build(mid, end, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = l;
  nodes_[static_cast<std::size_t>(id)].right = r;
  return id;
}

std::int64_t ExactOracle::count(const Rect& q) const {
  if (q.empty || n_ == 0) return 0;
  return dense_ ? count_dense(q) : count_tree(0, q);
}

std::int64_t ExactOracle::count_dense(const Rect& q) const {
  const std::int64_t side = dom_.delta + 1;
  std::int64_t total = 0;
  const int corners = 1 << dom_.dim;
  for (int mask = 0; mask < corners; ++mask) {
    Coord idx[3] = {0, 0, 0};
    int sign = 1;
    for (int k = 0; k < dom_.dim; ++k) {
      if (mask & (1 << k)) {
        idx[k] = q.lo[k];
        sign = -sign;
      } else {
        idx[k] = q.hi[k] + 1;
      }
    }
    const std::int64_t at = (idx[2] * side + idx[1]) * side + idx[0];
    total += sign * static_cast<std::int64_t>(prefix_[static_cast<std::size_t>(at)]);
  }
  return total;
}

std::int64_t ExactOracle::count_tree(std::int32_t id, const Rect& q) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  bool inside = true;
  for (int k = 0; k < dom_.dim; ++k) {
    if (node.hi[k] < q.lo[k] || node.lo[k] > q.hi[k]) return 0;
    if (node.lo[k] < q.lo[k] || node.hi[k] > q.hi[k]) inside = false;
  }
  if (inside) return node.count;
  if (node.left < 0) {
    std::int64_t c = 0;
    for (std::uint32_t i = node.begin; i < node.end; ++i) c += q.contains(pts_[i], dom_.dim);
    return c;
  }
  return count_tree(node.left, q) + count_tree(node.right, q);
}

std::shared_ptr<const ExactOracle> build_exact(const PointSet& ps) {
  return std::make_shared<const ExactOracle>(ps.domain, ps.points);
}

std::shared_ptr<const ExactOracle> build_exact(const PointSet& ps, Color color) {
  const auto pts = ps.only(color);
  return std::make_shared<const ExactOracle>(ps.domain, pts);
}

ColoredOracle build_colored(const PointSet& ps) {
  if (ps.count(Color::red) != ps.count(Color::blue))
    throw std::invalid_argument("red and blue sets must have equal size");
  return ColoredOracle{build_exact(ps, Color::red), build_exact(ps, Color::blue)};
}

void QueryLedger::charge(std::int64_t k) {
  total_ += k;
  per_phase_[phase_] += k;
}

QueryLedger::Phase::Phase(QueryLedger& ledger, std::string name)
    : ledger_(ledger), saved_(std::move(ledger.phase_)) {
  ledger_.phase_ = std::move(name);
}

QueryLedger::Phase::~Phase() { ledger_.phase_ = std::move(saved_); }

std::int64_t count(const RangeCountOracle& o, const Rect& q, QueryLedger& ledger) {
  ledger.charge();
  return o.count(q);
}

QuerySession::QuerySession(const RangeCountOracle& oracle, QueryLedger& ledger, bool memoize)
    : oracle_(&oracle), ledger_(&ledger), memoize_(memoize) {}

std::int64_t QuerySession::count(const Rect& q) {
  if (q.empty) return 0;
  if (!memoize_) return rcq::count(*oracle_, q, *ledger_);
  if (auto it = memo_.find(q); it != memo_.end()) return it->second;
  const auto c = rcq::count(*oracle_, q, *ledger_);
  memo_.emplace(q, c);
  return c;
}

std::map<std::string, std::int64_t> phase_delta(const std::map<std::string, std::int64_t>& before,
                                                const std::map<std::string, std::int64_t>& after) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [k, v] : after) {
    const auto it = before.find(k);
    const auto d = v - (it == before.end() ? 0 : it->second);
    if (d != 0) out[k] = d;
  }
  return out;
}

nlohmann::ordered_json to_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["queries_used"] = e.queries_used;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.params) j["params"][k] = v;
  j["phase_breakdown"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.phase_breakdown) j["phase_breakdown"][k] = v;
  return j;
}

}  // namespace rcq
