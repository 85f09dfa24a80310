#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "rcq/point_set.hpp"

namespace rcq {

enum class GadgetFamily { emd1d, emd2d, emd3d, cellsampling, mst };

std::string to_string(GadgetFamily f);
GadgetFamily parse_family(const std::string& name);

struct GadgetInstance {
  PointSet points;
  GadgetFamily family = GadgetFamily::emd1d;
  /// Effective parameters after any rounding (n, s or c, delta, witness, ...).
  std::map<std::string, double> params;
  /// Exact cost or cell count the construction guarantees, when known.
  std::optional<double> declared_cost;
  std::string declared_note;
};

/// Near gadgets in every cell of a grid over [Δ]^d, with the far gadget in
/// cell `witness` if given. |R| = |B| = n after rounding n up to a multiple
/// of 2^d * cells (cells = 8s in 1D, 16s in 2D, 64s in 3D; s is rounded up
/// to a square in 2D and a cube in 3D). delta = 0 picks the smallest
/// power of two that fits the runs.
GadgetInstance gen_emd_lb(int d, std::int64_t n, std::int64_t s,
                          std::optional<std::int64_t> witness, Coord delta = 0);

/// 1D instance with sqrt(n)/(4c) segments of 4c*sqrt(n) unit cells each.
/// n is rounded up so that sqrt(n) is a multiple of 4c.
GadgetInstance gen_cellsampling_lb(std::int64_t n, std::int64_t c,
                                   std::optional<std::int64_t> witness);

/// n is rounded up to k^6. A 4k x 4k grid of cells of side 4k^5 over
/// Δ = 16n, each holding a strip gadget of k^4 points, or the uniform
/// gadget in cell `witness`.
GadgetInstance gen_mst_lb(std::int64_t n, std::optional<std::int64_t> witness);

/// One gadget in isolation on [k^5]^2.
PointSet mst_strip_gadget(std::int64_t k);
PointSet mst_uniform_gadget(std::int64_t k);

}  // namespace rcq
