#include "doctest.h"

#include <cstdlib>
#include <set>
#include <vector>

#include "usf/rng.hpp"

using namespace usf;

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("replay and independence of streams") {
    RngStream a(7, 3), b(7, 3), c(7, 4), e(8, 3);
    int same_c = 0, same_e = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.next_u32();
      CHECK(x == b.next_u32());
      same_c += x == c.next_u32();
      same_e += x == e.next_u32();
    }
    CHECK(same_c < 3);
    CHECK(same_e < 3);
    CHECK(a.position() == 1000);
  }

  TEST_CASE("uniform_int is in range and roughly uniform") {
    RngStream r(1, 1);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) {
      const auto v = r.uniform_int(10);
      REQUIRE(v < 10);
      ++counts[v];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
    for (int i = 0; i < 1000; ++i) {
      const double u = r.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("keyed stacks are pure functions of their arguments") {
    const KeyedStacks s(5, 9), t(5, 9), other(5, 10);
    int diff = 0;
    for (std::uint64_t v = 0; v < 50; ++v)
      for (std::uint32_t j = 0; j < 20; ++j) {
        CHECK(s.direction(v, j, 10) == t.direction(v, j, 10));
        diff += s.direction(v, j, 10) != other.direction(v, j, 10);
      }
    CHECK(diff > 500);
  }

  TEST_CASE("children differ from parent and each other") {
    const RngStream p(3, 0);
    RngStream c1 = p.child(1), c2 = p.child(2), q = p;
    std::set<std::uint32_t> firsts{q.next_u32(), c1.next_u32(), c2.next_u32()};
    CHECK(firsts.size() == 3);
  }
}
