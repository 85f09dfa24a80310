#include "rcq/point_set.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rcq {

std::int64_t PointSet::count(Color c) const {
  std::int64_t n = 0;
  for (const auto& p : points) n += (p.color == c);
  return n;
}

std::vector<Point> PointSet::only(Color c) const {
  std::vector<Point> out;
  for (const auto& p : points)
    if (p.color == c) out.push_back(p);
  return out;
}

void PointSet::validate() const {
  for (const auto& p : points)
    if (!domain.contains(p.x)) throw std::invalid_argument("point outside the domain");
}

namespace {

char color_tag(Color c) {
  switch (c) {
    case Color::red: return 'R';
    case Color::blue: return 'B';
    case Color::plain: return 'P';
  }
  return 'P';
}

Color parse_color(const std::string& tag) {
  if (tag == "R") return Color::red;
  if (tag == "B") return Color::blue;
  if (tag == "P") return Color::plain;
  throw std::invalid_argument("bad color tag '" + tag + "'");
}

}  // namespace

PointSet read_point_set(std::istream& in) {
  int d = 0;
  Coord delta = 0;
  std::int64_t nr = 0, nb = 0, np = 0;
  if (!(in >> d >> delta >> nr >> nb >> np)) throw std::invalid_argument("malformed point-set header");
  if (nr < 0 || nb < 0 || np < 0) throw std::invalid_argument("negative point count in header");
  PointSet ps;
  ps.domain = DomainSpec::make(d, delta);
  const std::int64_t total = nr + nb + np;
  ps.points.reserve(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) {
    std::string tag;
    Point p;
    if (!(in >> tag)) throw std::invalid_argument("point-set file truncated");
    p.color = parse_color(tag);
    for (int k = 0; k < d; ++k)
      if (!(in >> p.x[k])) throw std::invalid_argument("point-set file truncated");
    ps.points.push_back(p);
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("trailing data after the last point");
  if (ps.count(Color::red) != nr || ps.count(Color::blue) != nb || ps.count(Color::plain) != np)
    throw std::invalid_argument("per-color counts do not match the header");
  ps.validate();
  return ps;
}

void write_point_set(std::ostream& out, const PointSet& ps) {
  out << ps.domain.dim << ' ' << ps.domain.delta << ' ' << ps.count(Color::red) << ' '
      << ps.count(Color::blue) << ' ' << ps.count(Color::plain) << '\n';
  for (const auto& p : ps.points) {
    out << color_tag(p.color);
    for (int k = 0; k < ps.domain.dim; ++k) out << ' ' << p.x[k];
    out << '\n';
  }
}

PointSet load_point_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_point_set(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_point_set(const std::filesystem::path& path, const PointSet& ps) {
  std::ostringstream ss;
  write_point_set(ss, ps);
  write_file_atomic(path, ss.str());
}

std::vector<Coords> locations(std::span<const Point> pts) {
  std::vector<Coords> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.x);
  return out;
}

}  // namespace rcq
