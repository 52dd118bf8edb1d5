#include "doctest.h"

#include <cmath>

#include "usf/walker.hpp"

using namespace usf;

namespace {
StopRule exit_rule(const Domain& d) {
  StopRule r;
  r.exit_domain = d;
  return r;
}
}  // namespace

TEST_SUITE("walker") {
  TEST_CASE("gambler's ruin symmetry and exit time in d=1") {
    const int m = 5;
    const StopRule rule = exit_rule(Domain::box(cube(1, m - 1)));
    RngStream rng(11, 0);
    const int runs = 100000;
    int right = 0;
    double steps = 0, steps2 = 0;
    for (int i = 0; i < runs; ++i) {
      const WalkOutcome w = run_walk(Point(1), rule, rng);
      REQUIRE(w.cause == StopCause::exited_domain);
      const int end = Lattice(1).unpack(w.path.back())[0];
      REQUIRE(std::abs(end) == m);
      right += end > 0;
      const double t = static_cast<double>(w.path.length());
      steps += t;
      steps2 += t * t;
    }
    const double p = static_cast<double>(right) / runs;
    CHECK(std::abs(p - 0.5) < 3 * std::sqrt(0.25 / runs));
    const double mean = steps / runs;
    const double sd = std::sqrt((steps2 / runs - mean * mean) / runs);
    CHECK(std::abs(mean - m * m) < 3 * sd);
  }

  TEST_CASE("hitting b before a from x") {
    // interval (a, b) = (-2, 6), start 1: probability 3/8
    const StopRule rule = exit_rule(Domain::box(Box{Point{2}, 3}));
    RngStream rng(12, 0);
    const int runs = 100000;
    int hit_b = 0;
    for (int i = 0; i < runs; ++i) hit_b += Lattice(1).unpack(run_walk(Point{1}, rule, rng).path.back())[0] == 6;
    const double p = static_cast<double>(hit_b) / runs;
    CHECK(std::abs(p - 0.375) < 3 * std::sqrt(0.375 * 0.625 / runs));
  }

  TEST_CASE("steps are nearest neighbour and the walk replays") {
    StopRule rule;
    rule.step_cap = 500;
    RngStream a(5, 9), b(5, 9);
    const WalkOutcome x = run_walk(Point(5), rule, a);
    const WalkOutcome y = run_walk(Point(5), rule, b);
    CHECK(x.path == y.path);
    CHECK(x.path.length() == 500);
    CHECK(x.cause == StopCause::step_cap);
    CHECK(x.path.is_nearest_neighbour());
  }

  TEST_CASE("hit set wins over exit and positive hitting skips index 0") {
    const Lattice lat(1);
    VertexSet a{lat.pack(Point{0})};
    StopRule rule;
    rule.hit_set = &a;
    RngStream rng(1, 2);
    CHECK(run_walk(Point{0}, rule, rng).path.length() == 0);
    rule.hit_set_positive = true;
    rule.exit_domain = Domain::box(cube(1, 3));
    for (int i = 0; i < 100; ++i) {
      const WalkOutcome w = run_walk(Point{0}, rule, rng);
      CHECK(w.path.length() >= 1);
      if (w.cause == StopCause::hit_set) CHECK(w.path.back() == lat.pack(Point{0}));
    }
  }

  TEST_CASE("conditioning on an empty set is the plain walk") {
    const Domain d = Domain::box(cube(2, 3));
    RngStream a(8, 1), b(8, 1);
    for (int i = 0; i < 50; ++i) {
      const ConditionedOutcome c = run_conditioned_walk(Point(2), {}, d, 10, a);
      CHECK(c.trials == 1);
      CHECK(c.walk.path == run_walk(Point(2), exit_rule(d), b).path);
    }
  }

  TEST_CASE("conditioned walk avoids the set and exhausted caps raise") {
    const Lattice lat(2);
    const Domain d = Domain::box(cube(2, 2));
    VertexSet avoid{lat.pack(Point{0, 0}), lat.pack(Point{1, 0})};
    RngStream rng(3, 3);
    for (int i = 0; i < 200; ++i) {
      const ConditionedOutcome c = run_conditioned_walk(Point{0, 0}, avoid, d, 100000, rng);
      const auto& v = c.walk.path.v;
      for (std::size_t j = 1; j < v.size(); ++j) CHECK_FALSE(avoid.contains(v[j]));
      CHECK_FALSE(d.contains(lat.unpack(v.back())));
    }
    // every neighbour of the origin sits in the avoided set
    VertexSet wall;
    for (int dir = 0; dir < 4; ++dir) wall.insert(lat.step(lat.pack(Point{0, 0}), dir));
    wall.insert(lat.pack(Point{0, 0}));
    CHECK_THROWS_AS(run_conditioned_walk(Point{0, 0}, wall, d, 100, rng), Error);
  }

  TEST_CASE("sample_lerw on a single vertex") {
    const Domain d = Domain::box(Box{Point(3), 0});
    RngStream rng(4, 4);
    std::vector<int> counts(6, 0);
    const Lattice lat(3);
    for (int i = 0; i < 6000; ++i) {
      const Path p = sample_lerw(Point(3), d, rng);
      REQUIRE(p.length() == 1);
      for (int dir = 0; dir < 6; ++dir) counts[dir] += p.back() == lat.step(lat.pack(Point(3)), dir);
    }
    for (int c : counts) CHECK(std::abs(c - 1000) < 150);
  }

  TEST_CASE("escape targets") {
    RngStream rng(6, 6);
    const Lattice lat(5);
    VertexSet t{lat.pack(Point(5))};
    CHECK(hits_before_escape(Point(5), t, 10, rng).hit);
    CHECK(hits_point_before_escape(Point(5), Point(5), 10, rng).hit);
    int hits = 0;
    for (int i = 0; i < 2000; ++i) hits += hits_point_before_escape(Point{0}, Point{3}, 1000, rng).hit;
    CHECK(hits > 1990);
  }
}
