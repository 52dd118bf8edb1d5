#include "usf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace usf {

Point::Point(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, "dimension must be in [1, 6]");
}

Point::Point(std::initializer_list<int> coords) : dim_(static_cast<int>(coords.size())) {
  require(dim_ >= 1 && dim_ <= kMaxDim, "dimension must be in [1, 6]");
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::unit(int dim, int axis, int sign) {
  require(axis >= 0 && axis < dim, "axis out of range");
  Point p(dim);
  p[axis] = sign;
  return p;
}

Point Point::operator+(const Point& o) const {
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

Point Point::operator-(const Point& o) const {
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] -= o[i];
  return r;
}

Point Point::operator*(int s) const {
  Point r(*this);
  for (int i = 0; i < dim_; ++i) r[i] *= s;
  return r;
}

bool Point::operator==(const Point& o) const {
  if (dim_ != o.dim_) return false;
  for (int i = 0; i < dim_; ++i)
    if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)]) return false;
  return true;
}

std::string Point::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << c_[static_cast<std::size_t>(i)];
  return os.str();
}

Norms norms(const Point& p) {
  Norms n{0, 0.0, 0};
  double sq = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    const int a = std::abs(p[i]);
    n.linf = std::max(n.linf, a);
    n.l1 += a;
    sq += static_cast<double>(a) * a;
  }
  n.l2 = std::sqrt(sq);
  return n;
}

int linf_distance(const Point& a, const Point& b) {
  int m = 0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_distance(const Point& a, const Point& b) {
  double sq = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    sq += t * t;
  }
  return std::sqrt(sq);
}

Lattice::Lattice(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, "dimension must be in [1, 6]");
  bits_ = std::min(21, 64 / dim);
  offset_ = std::int64_t{1} << (bits_ - 1);
  max_abs_ = static_cast<int>(offset_ - 2);
  for (int i = 0; i < dim; ++i) stride_[static_cast<std::size_t>(i)] = Key{1} << (bits_ * i);
}

Key Lattice::pack(const Point& p) const {
  require(p.dim() == dim_, "point dimension does not match lattice");
  Key k = 0;
  for (int i = 0; i < dim_; ++i) {
    if (std::abs(p[i]) > max_abs_) fail(ErrorKind::invalid_argument, "coordinate overflow in packing: " + p.to_string());
    k |= static_cast<Key>(p[i] + offset_) << (bits_ * i);
  }
  return k;
}

Point Lattice::unpack(Key k) const {
  Point p(dim_);
  const Key mask = (Key{1} << bits_) - 1;
  for (int i = 0; i < dim_; ++i)
    p[i] = static_cast<std::int32_t>(static_cast<std::int64_t>((k >> (bits_ * i)) & mask) - offset_);
  return p;
}

std::uint64_t Box::size() const {
  std::uint64_t s = 1;
  for (int i = 0; i < center.dim(); ++i) s *= static_cast<std::uint64_t>(2 * radius + 1);
  return s;
}

std::vector<Point> Box::vertices() const {
  std::vector<Point> out;
  const int d = center.dim();
  out.reserve(size());
  Point p = center;
  for (int i = 0; i < d; ++i) p[i] = center[i] - radius;
  while (true) {
    out.push_back(p);
    int i = 0;
    for (; i < d; ++i) {
      if (p[i] < center[i] + radius) {
        ++p[i];
        break;
      }
      p[i] = center[i] - radius;
    }
    if (i == d) break;
  }
  return out;
}

VertexSet Box::vertex_set() const {
  Lattice lat(center.dim());
  VertexSet s;
  s.reserve(size());
  for (const auto& p : vertices()) s.insert(lat.pack(p));
  return s;
}

Box cube(int dim, int radius) { return Box{Point(dim), radius}; }

Domain Domain::box(const Box& b, bool wired) { return boxes({b}, wired); }

Domain Domain::boxes(std::vector<Box> shapes, bool wired) {
  require(!shapes.empty(), "finite domain needs at least one box");
  Domain d;
  d.kind_ = DomainKind::FiniteBoxUnion;
  d.dim_ = shapes.front().center.dim();
  for (const auto& b : shapes) {
    require(b.center.dim() == d.dim_, "mixed dimensions in domain");
    require(b.radius >= 0, "negative box radius");
  }
  d.shapes_ = std::move(shapes);
  d.wired_ = wired;
  return d;
}

Domain Domain::all_lattice(int dim) {
  Domain d;
  d.kind_ = DomainKind::AllLattice;
  d.dim_ = dim;
  d.wired_ = false;
  return d;
}

bool Domain::contains(const Point& p) const {
  if (kind_ == DomainKind::AllLattice) return true;
  for (const auto& b : shapes_)
    if (b.contains(p)) return true;
  return false;
}

std::vector<Point> Domain::vertices() const {
  require(finite(), "vertices() of an infinite domain");
  if (shapes_.size() == 1) return shapes_.front().vertices();
  Lattice lat(dim_);
  VertexSet seen;
  std::vector<Point> out;
  for (const auto& b : shapes_)
    for (const auto& p : b.vertices())
      if (seen.insert(lat.pack(p)).second) out.push_back(p);
  return out;
}

VertexSet Domain::vertex_set() const {
  Lattice lat(dim_);
  VertexSet s;
  for (const auto& p : vertices()) s.insert(lat.pack(p));
  return s;
}

std::string Domain::describe() const {
  if (kind_ == DomainKind::AllLattice) return "Z^" + std::to_string(dim_);
  std::ostringstream os;
  for (std::size_t i = 0; i < shapes_.size(); ++i)
    os << (i ? "+" : "") << "Q(" << shapes_[i].center.to_string() << ";" << shapes_[i].radius << ")";
  if (wired_) os << ":wired";
  return os.str();
}

VertexSet boundary(const Lattice& lat, const VertexSet& a, BoundaryKind kind) {
  if (a.empty()) fail(ErrorKind::empty_set, "empty set");
  VertexSet out;
  for (Key k : a) {
    bool on_rim = false;
    for (int dir = 0; dir < lat.num_directions(); ++dir) {
      const Key n = lat.step(k, dir);
      if (!a.contains(n)) {
        on_rim = true;
        if (kind == BoundaryKind::outer) out.insert(n);
      }
    }
    if (kind == BoundaryKind::inner && on_rim) out.insert(k);
    if (kind == BoundaryKind::interior && !on_rim) out.insert(k);
  }
  return out;
}

VertexSet boundary(const Box& b, BoundaryKind kind) {
  return boundary(Lattice(b.center.dim()), b.vertex_set(), kind);
}

std::vector<Point> face(const Box& b, int axis, int sign) {
  const int d = b.center.dim();
  if (axis < 0 || axis >= d) fail(ErrorKind::invalid_argument, "face axis out of range");
  require(sign == 1 || sign == -1, "face sign must be +1 or -1");
  std::vector<Point> out;
  const int target = b.center[axis] + sign * b.radius;
  for (const auto& p : b.vertices())
    if (p[axis] == target) out.push_back(p);
  return out;
}

}  // namespace usf
