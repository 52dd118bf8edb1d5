#include "usf/path.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>

namespace usf {

Path Path::from_points(const std::vector<Point>& pts) {
  require(!pts.empty(), "path needs at least one vertex");
  Lattice lat(pts.front().dim());
  Path p;
  p.dim = lat.dim();
  p.v.reserve(pts.size());
  for (const auto& x : pts) p.v.push_back(lat.pack(x));
  return p;
}

std::vector<Point> Path::points() const {
  Lattice lat(dim);
  std::vector<Point> out;
  out.reserve(v.size());
  for (Key k : v) out.push_back(lat.unpack(k));
  return out;
}

bool Path::is_nearest_neighbour() const {
  if (v.size() < 2) return true;
  Lattice lat(dim);
  Point prev = lat.unpack(v.front());
  for (std::size_t i = 1; i < v.size(); ++i) {
    Point cur = lat.unpack(v[i]);
    if (norms(cur - prev).l1 != 1) return false;
    prev = cur;
  }
  return true;
}

bool Path::is_self_avoiding() const {
  VertexSet seen;
  seen.reserve(v.size());
  for (Key k : v)
    if (!seen.insert(k).second) return false;
  return true;
}

Path slice(const Path& g, const VertexSet& a, SliceMode mode) {
  std::size_t k1 = g.v.size(), k2 = 0;
  bool hit = false;
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    if (a.contains(g.v[i])) {
      if (!hit) k1 = i;
      k2 = i;
      hit = true;
    }
  }
  if (!hit) fail(ErrorKind::set_not_hit, "set not hit");
  const auto b = g.v.begin();
  switch (mode) {
    case SliceMode::BF: return Path(g.dim, {b + static_cast<std::ptrdiff_t>(k1), g.v.end()});
    case SliceMode::EF: return Path(g.dim, {b, b + static_cast<std::ptrdiff_t>(k1) + 1});
    case SliceMode::BL: return Path(g.dim, {b + static_cast<std::ptrdiff_t>(k2), g.v.end()});
    case SliceMode::EL: return Path(g.dim, {b, b + static_cast<std::ptrdiff_t>(k2) + 1});
  }
  fail(ErrorKind::internal, "bad slice mode");
}

Path shift_prefix(const Path& g, std::size_t k, PrefixMode mode) {
  if (k > g.length()) fail(ErrorKind::invalid_argument, "prefix index exceeds path length");
  const auto b = g.v.begin() + static_cast<std::ptrdiff_t>(k);
  if (mode == PrefixMode::Theta) return Path(g.dim, {b, g.v.end()});
  return Path(g.dim, {g.v.begin(), b + 1});
}

std::size_t hit_count(const Path& g, const VertexSet& a) {
  if (a.empty()) return 0;
  return static_cast<std::size_t>(std::count_if(g.v.begin(), g.v.end(), [&](Key k) { return a.contains(k); }));
}

Path loop_erase(const Path& g) {
  LoopEraser er(g.dim);
  for (Key k : g.v) er.push(k);
  return er.take();
}

Path reverse(const Path& g) {
  Path r = g;
  std::reverse(r.v.begin(), r.v.end());
  return r;
}

Path concat(const Path& a, const Path& b) {
  if (a.v.empty()) return b;
  if (b.v.empty()) return a;
  require(a.back() == b.front(), "concatenated paths must share the junction vertex");
  Path r = a;
  r.v.insert(r.v.end(), b.v.begin() + 1, b.v.end());
  return r;
}

void dump_path(std::ostream& os, const Path& g) {
  for (const auto& p : g.points()) os << p.to_string() << '\n';
}

}  // namespace usf
