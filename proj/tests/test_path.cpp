#include "doctest.h"

#include "usf/path.hpp"
#include "usf/walker.hpp"

using namespace usf;

namespace {
Path P(std::initializer_list<Point> pts) { return Path::from_points(std::vector<Point>(pts)); }
VertexSet S(std::initializer_list<Point> pts) {
  const Lattice lat(pts.begin()->dim());
  VertexSet s;
  for (const auto& p : pts) s.insert(lat.pack(p));
  return s;
}
}  // namespace

TEST_SUITE("path") {
  TEST_CASE("slices") {
    const Path g = P({{0, 0}, {1, 0}, {0, 0}, {-1, 0}});
    CHECK(slice(g, S({{0, 0}}), SliceMode::EL) == P({{0, 0}, {1, 0}, {0, 0}}));
    const Path h = P({{0, 0}, {1, 0}, {2, 0}, {1, 0}});
    CHECK(slice(h, S({{1, 0}}), SliceMode::BF) == P({{1, 0}, {2, 0}, {1, 0}}));
    CHECK(slice(h, S({{1, 0}}), SliceMode::BL) == P({{1, 0}}));
    CHECK(slice(h, S({{1, 0}}), SliceMode::EF) == P({{0, 0}, {1, 0}}));
    CHECK(slice(h, S({{0, 0}}), SliceMode::BF) == h);
    CHECK_THROWS_AS(slice(h, S({{5, 5}}), SliceMode::BF), Error);
  }

  TEST_CASE("shift and prefix") {
    const Path g = P({{0}, {1}, {2}, {3}});
    CHECK(shift_prefix(g, 0, PrefixMode::Theta) == g);
    CHECK(shift_prefix(g, g.length(), PrefixMode::Phi) == g);
    CHECK(shift_prefix(g, 1, PrefixMode::Phi) == P({{0}, {1}}));
    for (std::size_t k = 0; k <= g.length(); ++k) {
      const Path t = shift_prefix(shift_prefix(g, k, PrefixMode::Phi), k, PrefixMode::Theta);
      CHECK(t.v.size() == 1);
      CHECK(t.v[0] == g.v[k]);
    }
    CHECK_THROWS_AS(shift_prefix(g, 4, PrefixMode::Theta), Error);
  }

  TEST_CASE("hit counts") {
    CHECK(hit_count(P({{0}, {1}, {0}}), S({{0}})) == 2);
    CHECK(hit_count(P({{0}, {1}, {0}}), {}) == 0);
    RngStream rng(1, 1);
    const Path l = sample_lerw(Point(3), Domain::box(cube(3, 4)), rng);
    CHECK(hit_count(l, S({{20, 20, 20}})) == 0);
  }

  TEST_CASE("loop erasure") {
    const Path sa = P({{0, 0}, {1, 0}, {1, 1}});
    CHECK(loop_erase(sa) == sa);
    CHECK(loop_erase(P({{0, 0}, {1, 0}, {0, 0}, {0, 1}})) == P({{0, 0}, {0, 1}}));
    CHECK(loop_erase(P({{0}, {1}, {2}, {1}, {2}, {3}})) == P({{0}, {1}, {2}, {3}}));
    RngStream rng(2, 2);
    for (int i = 0; i < 200; ++i) {
      StopRule rule;
      rule.step_cap = 300;
      const Path w = run_walk(Point(2), rule, rng).path;
      const Path l = loop_erase(w);
      CHECK(l.is_self_avoiding());
      CHECK(l.is_nearest_neighbour());
      CHECK(l.front() == w.front());
      CHECK(l.back() == w.back());
      CHECK(loop_erase(l) == l);
    }
  }

  TEST_CASE("reverse and concat") {
    const Path one = P({{4, 4}});
    CHECK(reverse(one) == one);
    CHECK(reverse(P({{0}, {1}, {2}})) == P({{2}, {1}, {0}}));
    CHECK(concat(P({{0}, {1}}), P({{1}, {2}})) == P({{0}, {1}, {2}}));
    CHECK_THROWS_AS(concat(P({{0}, {1}}), P({{2}, {3}})), Error);
    RngStream rng(3, 3);
    StopRule rule;
    rule.step_cap = 100;
    const Path w = run_walk(Point(4), rule, rng).path;
    CHECK(reverse(w).length() == w.length());
  }

  TEST_CASE("length zero path") {
    const Path p = P({{0, 0, 0}});
    CHECK(p.length() == 0);
    CHECK(p.is_nearest_neighbour());
    CHECK(p.is_self_avoiding());
  }
}
