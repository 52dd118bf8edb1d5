#include <cstring>

#include "usf/forest.hpp"

namespace usf {

namespace {

// Dense storage on Q_inner, hash maps outside it.
class Slab {
 public:
  Slab(int dim, int inner) : dim_(dim), r_(inner) {
    std::int64_t s = 1;
    for (int a = 0; a < dim; ++a) {
      stride_[static_cast<std::size_t>(a)] = s;
      s *= 2 * inner + 1;
    }
    next_.assign(static_cast<std::size_t>(s), 0);
    label_.assign(static_cast<std::size_t>(s), -1);
  }

  bool inner(const Point& p) const {
    for (int a = 0; a < dim_; ++a)
      if (std::abs(p[a]) > r_) return false;
    return true;
  }
  std::size_t index(const Point& p) const {
    std::int64_t i = 0;
    for (int a = 0; a < dim_; ++a) i += (p[a] + r_) * stride_[static_cast<std::size_t>(a)];
    return static_cast<std::size_t>(i);
  }

  std::vector<std::int8_t> next_;
  std::vector<std::int32_t> label_;
  absl::flat_hash_map<Key, std::int8_t> next_out;
  absl::flat_hash_map<Key, std::int32_t> label_out;

 private:
  int dim_, r_;
  std::array<std::int64_t, kMaxDim> stride_{};
};

}  // namespace

std::uint64_t box_component_dense(int dim, int N, int box_factor, RngStream& rng) {
  require(N >= 1 && box_factor >= 1, "N and box factor must be positive");
  const int rb = box_factor * N;
  const Lattice lat(dim);
  const int nd = lat.num_directions();
  Slab s(dim, std::min(rb, 2 * N));
  std::int32_t fresh = 0;

  auto label_of = [&](const Point& p) -> std::int32_t {
    if (s.inner(p)) return s.label_[s.index(p)];
    auto it = s.label_out.find(lat.pack(p));
    return it == s.label_out.end() ? -1 : it->second;
  };

  auto branch = [&](const Point& start) {
    if (label_of(start) >= 0) return;
    Point p = start;
    std::int32_t lab;
    while (true) {
      const int dir = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(nd)));
      if (s.inner(p))
        s.next_[s.index(p)] = static_cast<std::int8_t>(dir);
      else
        s.next_out[lat.pack(p)] = static_cast<std::int8_t>(dir);
      Lattice::apply(p, dir);
      if (std::abs(p[Lattice::axis_of(dir)]) > rb) {
        lab = fresh++;
        break;
      }
      if ((lab = label_of(p)) >= 0) break;
    }
    p = start;
    while (true) {
      int dir;
      if (s.inner(p)) {
        const std::size_t i = s.index(p);
        s.label_[i] = lab;
        dir = s.next_[i];
      } else {
        const Key k = lat.pack(p);
        s.label_out[k] = lab;
        auto it = s.next_out.find(k);
        dir = it->second;
        s.next_out.erase(it);
      }
      Lattice::apply(p, dir);
      if (std::abs(p[Lattice::axis_of(dir)]) > rb || label_of(p) >= 0) break;
    }
  };

  const Point origin(dim);
  branch(origin);
  const auto cubes = cube(dim, N).vertices();
  for (const auto& p : cubes) branch(p);
  const std::int32_t l0 = label_of(origin);
  std::uint64_t count = 0;
  for (const auto& p : cubes) count += label_of(p) == l0 ? 1 : 0;
  return count;
}

}  // namespace usf
