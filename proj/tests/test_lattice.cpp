#include "doctest.h"

#include "usf/lattice.hpp"

using namespace usf;

TEST_SUITE("lattice") {
  TEST_CASE("pack and unpack round trip, steps move one coordinate") {
    for (int d = 1; d <= kMaxDim; ++d) {
      const Lattice lat(d);
      Point p(d);
      for (int a = 0; a < d; ++a) p[a] = (a % 2 ? -1 : 1) * (3 * a + 1);
      const Key k = lat.pack(p);
      CHECK(lat.unpack(k) == p);
      CHECK(k != kRootKey);
      for (int dir = 0; dir < lat.num_directions(); ++dir) {
        Point q = p;
        Lattice::apply(q, dir);
        CHECK(lat.step(k, dir) == lat.pack(q));
        CHECK(lat.step(lat.step(k, dir), dir ^ 1) == k);
      }
      Point far(d);
      far[d - 1] = -lat.max_abs_coord();
      CHECK(lat.unpack(lat.pack(far)) == far);
    }
  }

  TEST_CASE("box membership and size") {
    const Box b{Point{1, -2}, 2};
    CHECK(b.size() == 25);
    CHECK(b.vertices().size() == 25);
    CHECK(b.contains(Point{3, 0}));
    CHECK_FALSE(b.contains(Point{4, 0}));
    CHECK(cube(5, 2).size() == 3125);
  }

  TEST_CASE("boundaries") {
    const Lattice l1(1);
    const VertexSet outer = boundary(cube(1, 1), BoundaryKind::outer);
    CHECK(outer == VertexSet{l1.pack(Point{-2}), l1.pack(Point{2})});
    const Lattice l2(2);
    CHECK(boundary(cube(2, 1), BoundaryKind::interior) == VertexSet{l2.pack(Point{0, 0})});
    CHECK(boundary(cube(5, 2), BoundaryKind::inner).size() == 2882);
  }

  TEST_CASE("faces") {
    const auto f = face(cube(2, 1), 0, +1);
    CHECK(f.size() == 3);
    for (const auto& p : f) CHECK(p[0] == 1);
    const auto g = face(cube(1, 3), 0, -1);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == Point{-3});
    CHECK(face(cube(5, 2), 3, -1).size() == 625);
  }

  TEST_CASE("norms") {
    const Norms a = norms(Point{3, -4});
    CHECK(a.linf == 4);
    CHECK(a.l2 == doctest::Approx(5.0));
    CHECK(a.l1 == 7);
    const Norms z = norms(Point(3));
    CHECK(z.linf == 0);
    CHECK(z.l1 == 0);
    const Norms o = norms(Point{1, 1, 1, 1, 1});
    CHECK(o.l2 == doctest::Approx(std::sqrt(5.0)));
    CHECK(o.l1 == 5);
  }

  TEST_CASE("domains") {
    const Domain u = Domain::boxes({Box{Point{0, 0}, 1}, Box{Point{2, 0}, 1}});
    CHECK(u.contains(Point{3, 1}));
    CHECK_FALSE(u.contains(Point{0, 2}));
    CHECK(u.vertices().size() == 15);
    const Domain all = Domain::all_lattice(3);
    CHECK_FALSE(all.wired());
    CHECK_FALSE(all.finite());
    CHECK(all.contains(Point{1000, 0, 0}));
  }
}
