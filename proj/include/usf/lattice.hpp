#pragma once

#include <array>
#include <cstdlib>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <absl/container/flat_hash_set.h>

#include "usf/error.hpp"

namespace usf {

inline constexpr int kMaxDim = 6;

/// Packed vertex identifier. See Lattice for the encoding.
using Key = std::uint64_t;

/// Sentinel for the collapsed root r_D of a wired graph. Never a valid packed point.
inline constexpr Key kRootKey = ~Key{0};

using VertexSet = absl::flat_hash_set<Key>;

class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<int> coords);

  static Point unit(int dim, int axis, int sign = +1);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::int32_t& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator*(int s) const;
  bool operator==(const Point& o) const;

  std::string to_string() const;

 private:
  std::array<std::int32_t, kMaxDim> c_{};
  int dim_ = 0;
};

struct Norms {
  int linf;
  double l2;
  int l1;
};

Norms norms(const Point& p);
int linf_distance(const Point& a, const Point& b);
double l2_distance(const Point& a, const Point& b);

/// Reversible mixed-radix packing of points of Z^d into 64-bit keys.
///
/// Each axis gets floor(64/d) bits (at most 21) with offset 2^(bits-1), so
/// |coordinate| <= 2^(bits-1) - 2. Neighbour keys differ by a per-axis stride,
/// which lets walks step without unpacking.
class Lattice {
 public:
  explicit Lattice(int dim);

  int dim() const { return dim_; }
  int num_directions() const { return 2 * dim_; }
  /// Largest admissible |coordinate| on any axis.
  int max_abs_coord() const { return max_abs_; }

  Key pack(const Point& p) const;
  Point unpack(Key k) const;

  /// Direction index in [0, 2d): axis = dir / 2, sign = + for even dir.
  Key step(Key k, int dir) const {
    const Key s = stride_[static_cast<std::size_t>(dir >> 1)];
    return (dir & 1) ? k - s : k + s;
  }
  static int axis_of(int dir) { return dir >> 1; }
  static int sign_of(int dir) { return (dir & 1) ? -1 : +1; }
  static void apply(Point& p, int dir) { p[dir >> 1] += (dir & 1) ? -1 : +1; }

 private:
  int dim_;
  int bits_;
  int max_abs_;
  std::int64_t offset_;
  std::array<Key, kMaxDim> stride_{};
};

/// The L-infinity box Q(center, radius).
struct Box {
  Point center;
  int radius = 0;

  bool contains(const Point& p) const { return linf_distance(p, center) <= radius; }
  std::uint64_t size() const;
  std::vector<Point> vertices() const;
  VertexSet vertex_set() const;
};

Box cube(int dim, int radius);  // Q_n

enum class DomainKind { FiniteBoxUnion, AllLattice };

/// A finite union of boxes (optionally wired to a root) or all of Z^d.
class Domain {
 public:
  static Domain box(const Box& b, bool wired = true);
  static Domain boxes(std::vector<Box> shapes, bool wired = true);
  static Domain all_lattice(int dim);

  DomainKind kind() const { return kind_; }
  bool wired() const { return wired_; }
  bool finite() const { return kind_ == DomainKind::FiniteBoxUnion; }
  int dim() const { return dim_; }
  const std::vector<Box>& shapes() const { return shapes_; }

  bool contains(const Point& p) const;
  /// Non-null when the domain is a single box, which walkers special-case.
  const Box* single_box() const { return shapes_.size() == 1 ? &shapes_.front() : nullptr; }

  /// All vertices, deduplicated, in a deterministic order. Finite domains only.
  std::vector<Point> vertices() const;
  VertexSet vertex_set() const;

  std::string describe() const;

 private:
  DomainKind kind_ = DomainKind::AllLattice;
  std::vector<Box> shapes_;
  bool wired_ = false;
  int dim_ = 0;
};

/// Membership of a point that moves one axis at a time. For a single box
/// only the axis that just changed is tested.
class MembershipProbe {
 public:
  explicit MembershipProbe(const Domain* d) : d_(d), box_(d ? d->single_box() : nullptr) {}

  bool operator()(const Point& p, int axis) const {
    if (!d_ || !d_->finite()) return true;
    if (box_) return std::abs(p[axis] - box_->center[axis]) <= box_->radius;
    return d_->contains(p);
  }

 private:
  const Domain* d_;
  const Box* box_;
};

enum class BoundaryKind { outer, inner, interior };

/// Outer boundary, inner boundary, or interior of a finite vertex set.
VertexSet boundary(const Lattice& lat, const VertexSet& a, BoundaryKind kind);
VertexSet boundary(const Box& b, BoundaryKind kind);

/// Face {center_axis = center_axis + sign*radius} of a box; axis is 0-based.
std::vector<Point> face(const Box& b, int axis, int sign);

}  // namespace usf
