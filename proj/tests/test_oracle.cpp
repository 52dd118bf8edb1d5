#include "doctest.h"

#include <cmath>
#include <set>

#include "usf/oracle.hpp"
#include "usf/walker.hpp"

using namespace usf;

TEST_SUITE("oracle") {
  TEST_CASE("spanning tree counts") {
    CHECK(count_spanning_trees(cycle_graph(4), CountMethod::exhaustive) == 4);
    CHECK(count_spanning_trees(cycle_graph(4), CountMethod::determinant) == 4);
    CHECK(count_spanning_trees(complete_graph(4), CountMethod::exhaustive) == 16);
    CHECK(count_spanning_trees(complete_graph(4), CountMethod::determinant) == 16);
    CHECK(count_spanning_trees(complete_graph(7), CountMethod::determinant) == 16807);
    const WiredTiny w = wired_tiny_graph(Domain::box(cube(1, 1)));
    const BigInt e = count_spanning_trees(w.g, CountMethod::exhaustive);
    CHECK(e == count_spanning_trees(w.g, CountMethod::determinant));
    // the cycle root, -1, 0, 1
    CHECK(e == 4);
    CHECK(enumerate_spanning_trees(w.g).size() == 4);
    const WiredTiny q = wired_tiny_graph(Domain::box(cube(2, 1)));
    CHECK(count_spanning_trees(q.g, CountMethod::exhaustive) == count_spanning_trees(q.g, CountMethod::determinant));
  }

  TEST_CASE("exact loop-erased walk probabilities") {
    CHECK(lerw_exact_law(Domain::box(Box{Point{0, 0}, 0}), Path::from_points({Point{0, 0}, Point{1, 0}})) ==
          doctest::Approx(0.25));
    const Domain q1 = Domain::box(cube(1, 1));
    CHECK(lerw_exact_law(q1, Path::from_points({Point{0}, Point{1}, Point{2}})) == doctest::Approx(0.5));
    CHECK(lerw_exact_law(q1, Path::from_points({Point{0}, Point{1}})) == 0.0);
    const LerwLaw law(Domain::box(cube(2, 2)));
    double total = 0;
    std::size_t count = 0;
    law.for_each_path(Point{0, 0}, [&](const Path& g, double p) {
      CHECK(law.admissible(g));
      CHECK(law.probability(g) == doctest::Approx(p).epsilon(1e-12));
      total += p;
      ++count;
    });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(count > 100);

    const Path alpha = Path::from_points({Point{0, 0}, Point{0, 1}});
    double ct = 0;
    law.for_each_continuation(alpha, [&](const Path&, double p) { ct += p; });
    CHECK(ct == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("sampled tree signatures cover the tree set") {
    const Domain d = Domain::box(cube(1, 1));
    const WiredTiny w = wired_tiny_graph(d);
    const WiredGraph g(d);
    RngStream rng(3, 1);
    std::set<std::vector<int>> seen;
    for (int i = 0; i < 2000; ++i) {
      StreamDirections src(rng);
      seen.insert(tree_signature(w, wilson_sample(g, d.vertices(), src, true)));
    }
    CHECK(seen.size() == 4);
  }

  TEST_CASE("total variation helper") {
    CHECK(empirical_tv({{0.5, 50}, {0.5, 50}}, 100) == doctest::Approx(0.0));
    CHECK(empirical_tv({{0.5, 100}, {0.5, 0}}, 100) == doctest::Approx(0.5));
    CHECK(empirical_tv({{0.25, 100}}, 100) == doctest::Approx(0.75));
  }

  TEST_CASE("domain Markov report") {
    const DmpReport r0 = dmp_check(Domain::box(cube(2, 1)), 0, 50000, 5);
    CHECK(r0.tested == 1);
    CHECK(r0.max_tv < 0.03);
    CHECK(r0.zero_probability_prefixes == 0);
    const DmpReport r1 = dmp_check(Domain::box(cube(2, 2)), 1, 100, 5, 500);
    CHECK(r1.tested == 0);
  }
}
