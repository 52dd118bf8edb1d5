#pragma once

#include <iosfwd>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "usf/lattice.hpp"

namespace usf {

/// Finite nearest-neighbour path stored as packed keys. Length |γ| is the
/// number of steps, so a single vertex has length 0.
struct Path {
  int dim = 0;
  std::vector<Key> v;

  Path() = default;
  Path(int d, std::vector<Key> keys) : dim(d), v(std::move(keys)) {}
  static Path from_points(const std::vector<Point>& pts);

  std::size_t length() const { return v.empty() ? 0 : v.size() - 1; }
  Key front() const { return v.front(); }
  Key back() const { return v.back(); }
  bool operator==(const Path& o) const { return dim == o.dim && v == o.v; }

  std::vector<Point> points() const;
  /// Consecutive vertices at L1 distance 1.
  bool is_nearest_neighbour() const;
  bool is_self_avoiding() const;
};

enum class SliceMode { BF, BL, EF, EL };
enum class PrefixMode { Theta, Phi };

Path slice(const Path& g, const VertexSet& a, SliceMode mode);
Path shift_prefix(const Path& g, std::size_t k, PrefixMode mode);
std::size_t hit_count(const Path& g, const VertexSet& a);
Path loop_erase(const Path& g);
Path reverse(const Path& g);

/// Join a path ending at x with one starting at x; x appears once.
Path concat(const Path& a, const Path& b);

/// One vertex per line, comma-separated coordinates.
void dump_path(std::ostream& os, const Path& g);

/// Incremental chronological loop erasure, so walks need not be stored.
class LoopEraser {
 public:
  explicit LoopEraser(int dim) : dim_(dim) {}
  void reset() {
    path_.clear();
    index_.clear();
  }
  void push(Key x) {
    auto [it, fresh] = index_.try_emplace(x, path_.size());
    if (!fresh) {
      const std::size_t keep = it->second + 1;
      for (std::size_t i = keep; i < path_.size(); ++i) index_.erase(path_[i]);
      path_.resize(keep);
      return;
    }
    path_.push_back(x);
  }
  const std::vector<Key>& current() const { return path_; }
  Path take() {
    Path p(dim_, std::move(path_));
    reset();
    return p;
  }

 private:
  int dim_;
  std::vector<Key> path_;
  absl::flat_hash_map<Key, std::size_t> index_;
};

}  // namespace usf
