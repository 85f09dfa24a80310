#include "rcq/wspd.hpp"

#include <algorithm>
#include <utility>

namespace rcq {

bool well_separated(const QuadCell& a, const QuadCell& b, double eps, int dim) {
  const double side = static_cast<double>(std::max(a.side(), b.side()));
  return side <= eps * cell_distance(a, b, dim);
}

namespace {

struct Walker {
  QuerySession& s;
  double eps;
  const std::function<bool(const QuadCell&, const QuadCell&)>& keep;
  const std::function<void(const WspdPair&)>& emit;

  bool empty(const QuadCell& c) {
    return s.count(cell_rect(s.domain(), c, ShiftVector::zero())) == 0;
  }

  // `flip` records whether (c, c2) is reversed with respect to the
  // orientation of the top-level call.
  void rec(QuadCell c, QuadCell c2, bool flip) {
    if (c == c2 && c.level == 0) return;
    if (keep && !keep(c, c2)) return;
    if (empty(c) || empty(c2)) return;
    if (c2.side() < c.side()) {
      std::swap(c, c2);
      flip = !flip;
    }
    const int dim = s.domain().dim;
    const bool sep = well_separated(c, c2, eps, dim);
    if (sep || c2.level == 0) {
      // Two distinct leaves that fail the test are still a valid pairing of
      // single locations; they are flagged.
      emit(flip ? WspdPair{c2, c, sep} : WspdPair{c, c2, sep});
      return;
    }
    for (const auto& kid : children(c2, dim)) rec(kid, c, !flip);
  }
};

}  // namespace

void wspd_visit(QuerySession& s, const QuadCell& c, const QuadCell& c2, double eps,
                const std::function<bool(const QuadCell&, const QuadCell&)>& keep,
                const std::function<void(const WspdPair&)>& emit) {
  Walker w{s, eps, keep, emit};
  w.rec(c, c2, false);
}

std::vector<WspdPair> wspd(QuerySession& s, const QuadCell& c, const QuadCell& c2, double eps) {
  std::vector<WspdPair> out;
  wspd_visit(s, c, c2, eps, {}, [&](const WspdPair& p) { out.push_back(p); });
  return out;
}

std::vector<WspdPair> wspd(QuerySession& s, double eps) {
  const QuadCell root = root_cell(s.domain());
  return wspd(s, root, root, eps);
}

}  // namespace rcq
