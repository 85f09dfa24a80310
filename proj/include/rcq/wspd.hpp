#pragma once

#include <functional>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/oracle.hpp"

namespace rcq {

struct WspdPair {
  QuadCell a, b;
  bool valid = false;
};

/// eps * d(a, b) >= max side.
bool well_separated(const QuadCell& a, const QuadCell& b, double eps, int dim);

/// Pair recursion over the unshifted quadtree: split the larger cell,
/// drop empty cells, emit a pair once it is well separated. Pairs come out
/// oriented so that every ordered point pair (p, q), p != q, lies in
/// exactly one emitted (a, b) with p in a and q in b.
std::vector<WspdPair> wspd(QuerySession& s, const QuadCell& c, const QuadCell& c2, double eps);
std::vector<WspdPair> wspd(QuerySession& s, double eps);

/// Same recursion with a caller-side filter. `keep(a, b)` is asked before
/// any query on the pair; returning false drops the pair and its subtree.
void wspd_visit(QuerySession& s, const QuadCell& c, const QuadCell& c2, double eps,
                const std::function<bool(const QuadCell&, const QuadCell&)>& keep,
                const std::function<void(const WspdPair&)>& emit);

}  // namespace rcq
