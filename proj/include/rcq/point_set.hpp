#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rcq/geometry.hpp"

namespace rcq {

struct PointSet {
  DomainSpec domain;
  std::vector<Point> points;

  std::int64_t count(Color c) const;
  /// Points of one color, in stored order.
  std::vector<Point> only(Color c) const;
  /// Throws std::invalid_argument if a point lies outside the domain.
  void validate() const;
};

/// Text format:
///   d Δ n_red n_blue n_plain
///   <R|B|P> x_1 ... x_d        (one line per point)
/// A non power-of-two Δ in the header is padded up on read.
PointSet read_point_set(std::istream& in);
void write_point_set(std::ostream& out, const PointSet& ps);

PointSet load_point_set(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames, so a failed write never
/// leaves a partial file behind.
void save_point_set(const std::filesystem::path& path, const PointSet& ps);
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::vector<Coords> locations(std::span<const Point> pts);

}  // namespace rcq
