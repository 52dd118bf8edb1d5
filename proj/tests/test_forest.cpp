#include "doctest.h"

#include <deque>

#include "usf/experiments.hpp"
#include "usf/forest.hpp"

using namespace usf;

namespace {
absl::flat_hash_map<Key, int> bfs_ball(const SpanningForest& f, Key x, int n) {
  absl::flat_hash_map<Key, std::vector<Key>> adj;
  for (const auto& [k, p] : f.parents())
    if (p != kRootKey) {
      adj[k].push_back(p);
      adj[p].push_back(k);
    }
  absl::flat_hash_map<Key, int> dist{{x, 0}};
  std::deque<Key> q{x};
  while (!q.empty()) {
    const Key v = q.front();
    q.pop_front();
    if (dist[v] == n) continue;
    for (Key w : adj[v])
      if (dist.try_emplace(w, dist[v] + 1).second) q.push_back(w);
  }
  return dist;
}
}  // namespace

TEST_SUITE("forest") {
  TEST_CASE("single vertex domain") {
    for (int d : {1, 3, 5}) {
      const WiredGraph g(Domain::box(Box{Point(d), 0}));
      RngStream rng(1, 1);
      const SpanningForest f = wilson_sample(g, {Point(d)}, rng);
      const Key o = Lattice(d).pack(Point(d));
      CHECK(f.size() == 1);
      CHECK(f.parent(o) == kRootKey);
      CHECK(component(f, Point(d), {o}) == VertexSet{o});
    }
  }

  TEST_CASE("Wilson forests are valid spanning forests") {
    const Domain dom = Domain::box(cube(3, 3));
    const WiredGraph g(dom);
    RngStream rng(2, 2);
    for (int t = 0; t < 20; ++t) {
      const SpanningForest f = wilson_sample(g, dom.vertices(), rng);
      CHECK(f.size() == dom.vertices().size());
      CHECK_NOTHROW(f.validate());
    }
    SpanningForest broken(1);
    const Lattice l1(1);
    broken.set_parent(l1.pack(Point{0}), l1.pack(Point{1}));
    broken.set_parent(l1.pack(Point{1}), l1.pack(Point{0}));
    CHECK_THROWS_AS(broken.validate(), Error);
  }

  TEST_CASE("tree distance is a metric and components follow root paths") {
    const Domain dom = Domain::box(cube(2, 4));
    const WiredGraph g(dom);
    RngStream rng(3, 3);
    const auto pts = dom.vertices();
    const Lattice lat(2);
    for (int t = 0; t < 10; ++t) {
      const SpanningForest f = wilson_sample(g, pts, rng);
      for (int s = 0; s < 100; ++s) {
        const Point& x = pts[rng.uniform_int(static_cast<std::uint32_t>(pts.size()))];
        const Point& y = pts[rng.uniform_int(static_cast<std::uint32_t>(pts.size()))];
        const Point& z = pts[rng.uniform_int(static_cast<std::uint32_t>(pts.size()))];
        CHECK(tree_distance(f, x, x) == std::optional<std::int64_t>(0));
        const Key px = f.parent(lat.pack(x));
        if (px != kRootKey) CHECK(tree_distance(f, x, lat.unpack(px)) == std::optional<std::int64_t>(1));
        const auto xy = tree_distance(f, x, y), yz = tree_distance(f, y, z), xz = tree_distance(f, x, z);
        if (xy && yz) {
          REQUIRE(xz.has_value());
          CHECK(*xz <= *xy + *yz);
        }
        std::vector<Key> within{lat.pack(y)};
        CHECK(component(f, x, within).contains(lat.pack(y)) == xy.has_value());
      }
    }
    SpanningForest empty(2);
    CHECK_THROWS_AS(component(empty, Point{0, 0}, {lat.pack(Point{0, 0})}), Error);
  }

  TEST_CASE("intrinsic ball equals a search on the full forest from the same stacks") {
    for (int d : {2, 3}) {
      const Domain dom = Domain::box(cube(d, 8));
      const WiredGraph g(dom);
      for (std::uint64_t s = 0; s < 10; ++s) {
        const KeyedStacks stacks(44, s);
        for (int n : {0, 1, 2}) {
          StackDirections a2(stacks);
          const BallResult ball = intrinsic_ball(dom, n, a2);
          StackDirections b2(stacks);
          const SpanningForest full = wilson_sample(g, dom.vertices(), b2);
          const auto want = bfs_ball(full, Lattice(d).pack(Point(d)), n);
          CHECK(ball.members == want);
          if (n == 0) CHECK(ball.members.size() == 1);
        }
      }
    }
  }

  TEST_CASE("dense box kernel reproduces the generic builder") {
    for (int N : {2, 3, 4})
      for (std::uint64_t s = 0; s < 5; ++s) {
        RngStream rng(77, s);
        CHECK(box_component_dense(5, N, 4, rng) == box_volume_sample(5, N, 4, 77, s));
      }
    RngStream rng(1, 0);
    CHECK(box_component_dense(5, 2, 1, rng) >= 1);
  }

  TEST_CASE("cycle popping with a tree on top pops nothing") {
    const Domain dom = Domain::box(cube(1, 2));
    const WiredGraph g(dom);
    // seed search: a stack system whose top arrows all point towards +infinity
    for (std::uint64_t s = 0; s < 4000; ++s) {
      StackSystem sys(5, s);
      const Lattice lat(1);
      bool right = true;
      for (const auto& p : dom.vertices()) right = right && sys.top_direction(lat.pack(p), 2) == 0;
      if (!right) continue;
      RngStream order(6, s);
      const SpanningForest f = pop_all_cycles(sys, g, order);
      CHECK(sys.pop_log.empty());
      for (const auto& p : dom.vertices()) {
        const Point q{p[0] + 1};
        CHECK(f.parent(lat.pack(p)) == (dom.contains(q) ? lat.pack(q) : kRootKey));
      }
      return;
    }
    FAIL("no stack system with a tree on top");
  }

  TEST_CASE("cycle popping is order independent") {
    const Domain dom = Domain::box(cube(2, 1));
    const WiredGraph g(dom);
    for (std::uint64_t s = 0; s < 20; ++s) {
      std::optional<SpanningForest> first;
      for (std::uint64_t j = 0; j < 5; ++j) {
        StackSystem sys(9, s);
        RngStream order(10, s * 100 + j);
        SpanningForest f = pop_all_cycles(sys, g, order);
        if (!first)
          first = std::move(f);
        else
          CHECK(f == *first);
      }
    }
  }
}
