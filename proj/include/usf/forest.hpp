#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "usf/lattice.hpp"
#include "usf/path.hpp"
#include "usf/rng.hpp"

namespace usf {

/// Domain with everything outside collapsed to the root r_D.
struct WiredGraph {
  Domain domain;

  explicit WiredGraph(Domain d);
  int dim() const { return domain.dim(); }
};

/// Sparse parent-pointer forest over the revealed vertices.
class SpanningForest {
 public:
  explicit SpanningForest(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  bool revealed(Key k) const { return k == kRootKey || parent_.contains(k); }
  Key parent(Key k) const;
  std::size_t size() const { return parent_.size(); }
  const absl::flat_hash_map<Key, Key>& parents() const { return parent_; }
  void set_parent(Key k, Key p) { parent_[k] = p; }
  /// Direction of each parent edge, kept only when requested. Needed to tell
  /// apart parallel edges to the root.
  absl::flat_hash_map<Key, std::int8_t> parent_dir;

  /// Vertices from k up to and including the root sentinel.
  std::vector<Key> path_to_root(Key k) const;
  /// Edges to root, checking acyclicity; throws on a broken forest.
  void validate() const;

  std::vector<Key> start_order;  // metadata for replay

 private:
  int dim_;
  absl::flat_hash_map<Key, Key> parent_;
};

bool operator==(const SpanningForest& a, const SpanningForest& b);

/// Stacks of arrows at every vertex; entry j at v is fixed by the seed.
struct StackSystem {
  KeyedStacks stacks;
  absl::flat_hash_map<Key, std::uint32_t> top;  // index of the current top entry
  std::vector<std::vector<Key>> pop_log;

  StackSystem(std::uint64_t seed, std::uint64_t stream) : stacks(seed, stream) {}
  int top_direction(Key v, int ndirs) const {
    auto it = top.find(v);
    return stacks.direction(v, it == top.end() ? 0 : it->second, ndirs);
  }
};

/// Where Wilson's walks take their next step from.
class DirectionSource {
 public:
  virtual ~DirectionSource() = default;
  virtual int next(Key v, int ndirs) = 0;
};

class StreamDirections final : public DirectionSource {
 public:
  explicit StreamDirections(RngStream& rng) : rng_(&rng) {}
  int next(Key, int ndirs) override { return static_cast<int>(rng_->uniform_int(static_cast<std::uint32_t>(ndirs))); }

 private:
  RngStream* rng_;
};

/// Reads stack entries in order: the j-th departure from v uses entry j.
class StackDirections final : public DirectionSource {
 public:
  explicit StackDirections(const KeyedStacks& s) : s_(s) {}
  int next(Key v, int ndirs) override { return s_.direction(v, reads_[v]++, ndirs); }
  const absl::flat_hash_map<Key, std::uint32_t>& reads() const { return reads_; }

 private:
  KeyedStacks s_;
  absl::flat_hash_map<Key, std::uint32_t> reads_;
};

/// Incremental Wilson's algorithm; branches can be added one start at a time.
class WilsonBuilder {
 public:
  WilsonBuilder(const WiredGraph& g, DirectionSource& src, std::size_t vertex_cap = 0, bool record_dirs = false);

  /// LERW from start to the current tree; returns the attachment vertex
  /// (kRootKey when the branch reached the root directly).
  Key add_branch(Key start);
  const SpanningForest& forest() const { return forest_; }
  SpanningForest take() { return std::move(forest_); }
  std::uint64_t steps() const { return steps_; }

 private:
  const WiredGraph& g_;
  Lattice lat_;
  DirectionSource& src_;
  std::size_t cap_;
  bool record_dirs_;
  SpanningForest forest_;
  absl::flat_hash_map<Key, std::int8_t> last_exit_;
  std::uint64_t steps_ = 0;
};

SpanningForest wilson_sample(const WiredGraph& g, const std::vector<Point>& starts, RngStream& rng);
SpanningForest wilson_sample(const WiredGraph& g, const std::vector<Point>& starts, DirectionSource& src,
                             bool record_dirs = false);

/// Cycle popping on a finite wired graph. Suspects are processed in an order
/// drawn from order_rng; the result must not depend on it.
SpanningForest pop_all_cycles(StackSystem& s, const WiredGraph& g, RngStream& order_rng,
                              std::uint64_t pop_cap = 1'000'000'000ull);

/// { y in within : the tree path from y to x avoids the root }.
VertexSet component(const SpanningForest& f, const Point& x, const std::vector<Key>& within);

std::optional<std::int64_t> tree_distance(const SpanningForest& f, const Point& x, const Point& y);

struct BallResult {
  Point center;
  int radius_intrinsic = 0;
  absl::flat_hash_map<Key, int> members;
  Domain domain_used;
  std::size_t revealed = 0;
  std::uint64_t walk_steps = 0;
};

struct BallOptions {
  std::size_t vertex_cap = 50'000'000;
  bool full_starts = false;  // reveal all of Q_n instead of the adaptive frontier
};

BallResult intrinsic_ball(const Domain& d, int n, DirectionSource& src, const BallOptions& opt = {});
BallResult intrinsic_ball(const Domain& d, int n, RngStream& rng, const BallOptions& opt = {});

/// |Q_N ∩ U_0| for one Wilson run on the wired Q(box_factor * N) with starts 0
/// then Q_N in cube order. Dense arrays on Q_{2N}, hash maps beyond. Consumes
/// rng exactly as WilsonBuilder with StreamDirections does, so both give the
/// same forest.
std::uint64_t box_component_dense(int dim, int N, int box_factor, RngStream& rng);

void dump_forest(std::ostream& os, const SpanningForest& f);

}  // namespace usf
