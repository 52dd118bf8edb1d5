#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <boost/multiprecision/cpp_int.hpp>

#include "usf/forest.hpp"
#include "usf/lattice.hpp"
#include "usf/path.hpp"
#include "usf/rng.hpp"

namespace usf {

using BigInt = boost::multiprecision::cpp_int;

/// Small multigraph. Parallel edges are kept; self-loops are ignored.
struct TinyGraph {
  int n = 0;
  int root = -1;  // -1: vertex 0 serves as root for enumeration
  std::vector<std::pair<int, int>> edges;
};

TinyGraph cycle_graph(int n);
TinyGraph complete_graph(int n);

/// A wired lattice domain as a TinyGraph, with the edge used by each
/// (vertex, direction) so Wilson samples can be mapped to edge sets.
struct WiredTiny {
  TinyGraph g;
  std::vector<Key> keys;  // sorted; vertex i of g, root is index keys.size()
  absl::flat_hash_map<Key, int> index;
  std::vector<std::vector<int>> edge_of;  // [vertex][dir]
};

WiredTiny wired_tiny_graph(const Domain& d);

enum class CountMethod { exhaustive, determinant };

/// Exhaustive: <= 16 vertices and a bounded product of degrees.
/// Determinant: <= 200 vertices.
BigInt count_spanning_trees(const TinyGraph& g, CountMethod method);

/// Every spanning tree as the edge chosen by each non-root vertex towards the
/// root, in vertex order. Respects edge multiplicity.
std::vector<std::vector<int>> enumerate_spanning_trees(const TinyGraph& g, std::uint64_t max_assignments = 50'000'000);

/// Edge signature of a forest over a wired tiny graph; the forest must
/// record parent directions and cover the domain.
std::vector<int> tree_signature(const WiredTiny& w, const SpanningForest& f);

/// Exact loop-erased walk laws on a small wired domain.
class LerwLaw {
 public:
  explicit LerwLaw(const Domain& d);

  const Domain& domain() const { return d_; }
  /// Self-avoiding, nearest neighbour, inside D until the last vertex, which lies in ∂D.
  bool admissible(const Path& g) const;
  /// P(L = γ) for the loop erasure of the walk from γ_0 stopped on exiting D.
  double probability(const Path& g) const;
  /// Probability that the loop erasure of the walk from α's endpoint,
  /// conditioned on τ_D < T^+_α, equals β.
  double conditioned_probability(const Path& alpha, const Path& beta) const;
  /// P^x(τ_D < T^+_α) with x the endpoint of α.
  double escape_plus(const Path& alpha) const;
  /// Visit every admissible path from start with its probability.
  void for_each_path(const Point& start, const std::function<void(const Path&, double)>& fn) const;
  /// Same for the conditioned continuation after α.
  void for_each_continuation(const Path& alpha, const std::function<void(const Path&, double)>& fn) const;

  /// G_{D minus removed}(v, v); removed given as domain indices.
  double green_diag(const std::vector<char>& removed, int v) const;
  int index(Key k) const {
    auto it = index_.find(k);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  void dfs(std::vector<Key>& path, std::vector<char>& removed, double prob, bool loops_at_start,
           const std::function<void(const Path&, double)>& fn) const;

  Domain d_;
  Lattice lat_;
  std::vector<Key> keys_;
  absl::flat_hash_map<Key, int> index_;
  mutable absl::flat_hash_map<std::string, double> memo_;
};

double lerw_exact_law(const Domain& d, const Path& g);

/// Total variation between the empirical law of `counts` and the exact
/// law p, summing only observed outcomes plus the unobserved exact mass.
double empirical_tv(const std::vector<std::pair<double, std::uint64_t>>& exact_and_counts, std::uint64_t total);

struct DmpItem {
  Path alpha;
  std::uint64_t samples = 0;
  double tv = 0.0;
  bool tested = false;
};

struct DmpReport {
  std::vector<DmpItem> items;
  double max_tv = 0.0;
  int tested = 0;
  std::uint64_t zero_probability_prefixes = 0;  // observed prefixes of exact probability 0
};

using Eraser = std::function<Path(const Path&)>;

/// Domain Markov check: conditional continuation laws after each observed
/// length-k prefix against the exact conditioned law.
DmpReport dmp_check(const Domain& d, int k, std::uint64_t samples, std::uint64_t seed, std::uint64_t min_samples = 500,
                    const Eraser& eraser = loop_erase);

}  // namespace usf
