#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "usf/harmonic.hpp"
#include "usf/walker.hpp"

using namespace usf;

TEST_SUITE("harmonic") {
  TEST_CASE("Dirichlet problem on an interval is linear") {
    const Lattice lat(1);
    DirichletProblem p;
    p.dim = 1;
    for (int x = -2; x <= 5; ++x) p.domain.insert(lat.pack(Point{x}));
    p.boundary_values[lat.pack(Point{-3})] = 0.0;
    p.boundary_values[lat.pack(Point{6})] = 1.0;
    const Field h = solve_dirichlet(p);
    for (int x = -2; x <= 5; ++x) CHECK(h.at(lat.pack(Point{x})) == doctest::Approx((x + 3) / 9.0).epsilon(1e-12));
  }

  TEST_CASE("one face of four and constant data") {
    const int m = 4;
    const Lattice lat(2);
    DirichletProblem p;
    p.dim = 2;
    p.domain = cube(2, m - 1).vertex_set();
    for (Key b : boundary(lat, p.domain, BoundaryKind::outer)) p.boundary_values[b] = lat.unpack(b)[0] == m ? 1.0 : 0.0;
    CHECK(solve_dirichlet(p).at(lat.pack(Point{0, 0})) == doctest::Approx(0.25).epsilon(1e-12));
    for (auto& [k, v] : p.boundary_values) v = 2.5;
    for (const auto& [k, v] : solve_dirichlet(p)) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }

  TEST_CASE("exact Green function") {
    const Lattice l1(1);
    const GreenTable g1 = green_exact(1, VertexSet{l1.pack(Point{0})});
    CHECK(g1(l1.pack(Point{0}), l1.pack(Point{0})) == doctest::Approx(1.0));

    RngStream rng(2, 7);
    const Lattice l3(3);
    VertexSet dom;
    for (const auto& p : cube(3, 2).vertices())
      if (rng.uniform01() < 0.6) dom.insert(l3.pack(p));
    dom.insert(l3.pack(Point(3)));
    const GreenTable g = green_exact(3, dom);
    for (Key x : dom)
      for (Key y : dom) CHECK(std::abs(g(x, y) - g(y, x)) < 1e-10);

    // Monte Carlo visit counts on Q_1 in d=2
    const Lattice l2(2);
    const Domain q1 = Domain::box(cube(2, 1));
    const GreenTable gq = green_exact(2, q1.vertex_set());
    StopRule rule;
    rule.exit_domain = q1;
    const Key o = l2.pack(Point{0, 0});
    double s = 0, s2 = 0;
    const int runs = 100000;
    for (int i = 0; i < runs; ++i) {
      double visits = 0;
      for (Key k : run_walk(Point{0, 0}, rule, rng).path.v) visits += k == o;
      s += visits;
      s2 += visits * visits;
    }
    const double mean = s / runs, se = std::sqrt((s2 / runs - mean * mean) / runs);
    CHECK(std::abs(mean - gq(o, o)) < 3 * se);
  }

  TEST_CASE("free Green function") {
    const double g0 = green_free(Point(5));
    CHECK(g0 > 1.0);
    CHECK(g0 < 1.2);
    CHECK(green_free_error(Point(5)) < 1e-4 * g0);
    const double g2 = green_free(Point{2, 0, 0, 0, 0}), g4 = green_free(Point{4, 0, 0, 0, 0}),
                 g8 = green_free(Point{8, 0, 0, 0, 0});
    CHECK(g2 > g4);
    CHECK(g4 > g8);
    CHECK(g8 / green_free_asymptotic(Point{8, 0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(green_free(Point{1, 0}), Error);

    // G(x)/G(0) is the probability of ever hitting x
    RngStream rng(9, 9);
    for (int r : {2, 4}) {
      const Point x{r, 0, 0, 0, 0};
      const int runs = 10000;
      int hits = 0;
      for (int i = 0; i < runs; ++i) hits += hits_point_before_escape(Point(5), x, 16 * r, rng).hit;
      const double p = static_cast<double>(hits) / runs, want = green_free(x) / g0;
      CHECK(std::abs(p - want) < 3 * std::sqrt(want * (1 - want) / runs) + 0.01 * want);
    }
  }

  TEST_CASE("capacity of a point, monotonicity and subadditivity") {
    const Lattice lat(5);
    const VertexSet origin{lat.pack(Point(5))};
    const double g0 = green_free(Point(5));
    CHECK(capacity_exact(5, origin) * g0 == doctest::Approx(1.0).epsilon(1e-8));
    RngStream rng(1, 5);
    const CapacityResult mc = capacity(5, origin, CapacityMethod::mc, 20, 20000, &rng);
    CHECK(std::abs(mc.value * g0 - 1.0) < 0.02 + 3 * mc.stderr_ * g0);

    for (int t = 0; t < 20; ++t) {
      VertexSet k1, k2;
      for (const auto& p : cube(5, 1).vertices()) {
        const double u = rng.uniform01();
        if (u < 0.03) k1.insert(lat.pack(p));
        if (u < 0.06) k2.insert(lat.pack(p));
      }
      k1.insert(lat.pack(Point(5)));
      k2.insert(lat.pack(Point(5)));
      VertexSet k3;
      for (const auto& p : Box{Point{3, 0, 0, 0, 0}, 1}.vertices())
        if (rng.uniform01() < 0.05) k3.insert(lat.pack(p));
      k3.insert(lat.pack(Point{3, 0, 0, 0, 0}));
      VertexSet u = k1;
      u.insert(k3.begin(), k3.end());
      const double c1 = capacity_exact(5, k1), c2 = capacity_exact(5, k2), c3 = capacity_exact(5, k3);
      CHECK(c1 <= c2 + 1e-10);
      CHECK(capacity_exact(5, u) <= c1 + c3 + 1e-10);
    }
    CHECK_THROWS_AS(capacity_exact(5, {}), Error);
  }

  TEST_CASE("hit probability from the equilibrium measure") {
    const Lattice lat(5);
    const VertexSet k{lat.pack(Point(5)), lat.pack(Point{1, 0, 0, 0, 0})};
    const Measure e = equilibrium_measure(5, k);
    CHECK(hit_probability(Point(5), e) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hit_probability(Point{6, 0, 0, 0, 0}, e) < hit_probability(Point{3, 0, 0, 0, 0}, e));
  }

  TEST_CASE("convolution bound") {
    const double c = 1.0;
    const long r = conv_bound_min_radius(1, c);
    const double s1 = conv_bound_sum(5, 1, r, c);
    CHECK(s1 >= 1.0);
    CHECK(s1 <= 10.0);
    CHECK(conv_bound_sum(5, 1, 2 * r, c) == doctest::Approx(s1).epsilon(0.01));
    CHECK(conv_bound_sum_direct(5, 1, r, c) == doctest::Approx(s1).epsilon(1e-9));
    const long r2 = conv_bound_min_radius(2, c);
    CHECK(conv_bound_sum_direct(5, 2, r2, c) == doctest::Approx(conv_bound_sum(5, 2, r2, c)).epsilon(1e-9));
    CHECK_THROWS_AS(conv_bound_sum(5, 100, 2, c), Error);

    const double cd = conv_bound_c(5);
    std::vector<double> ratios;
    for (long n : {100L, 1000L, 10000L}) {
      const long rr = conv_bound_min_radius(n, cd);
      const double v = conv_bound_sum(5, n, rr, cd);
      CHECK(conv_bound_sum(5, n, 2 * rr, cd) == doctest::Approx(v).epsilon(0.01));
      ratios.push_back(v / static_cast<double>(n));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo < 2.0);
  }

  TEST_CASE("boundary Harnack ratio on a few sets") {
    const Lattice lat(2);
    for (int m : {3, 4, 5}) {
      VertexSet k{lat.pack(Point{0, 0})};
      CHECK(harnack_exit_ratio(2, m, k) >= 0.25 - 1e-10);
      k.insert(lat.pack(Point{-1, 1}));
      k.insert(lat.pack(Point{-m + 1, -m + 1}));
      CHECK(harnack_exit_ratio(2, m, k) >= 0.25 - 1e-10);
    }
  }
}

TEST_SUITE("harmonic.htransform") {
  TEST_CASE("conditioned Green function against an explicit transformed chain") {
    // D = Q_2 in d=2, alpha = (0, e1)
    const int dim = 2;
    const Lattice lat(dim);
    const Box box = cube(dim, 2);
    const Domain dom = Domain::box(box);
    const Path alpha = Path::from_points({Point{0, 0}, Point{1, 0}});
    const VertexSet a(alpha.v.begin(), alpha.v.end());

    std::vector<Key> states;
    for (const auto& p : box.vertices())
      if (!a.contains(lat.pack(p))) states.push_back(lat.pack(p));
    std::sort(states.begin(), states.end());
    const int n = static_cast<int>(states.size());
    auto idx = [&](Key k) {
      auto it = std::lower_bound(states.begin(), states.end(), k);
      return (it != states.end() && *it == k) ? static_cast<int>(it - states.begin()) : -1;
    };
    // h = P(exit D before hitting alpha), by a dense solve
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int dir = 0; dir < 2 * dim; ++dir) {
        const Key y = lat.step(states[i], dir);
        if (!dom.contains(lat.unpack(y)))
          rhs(i) += 0.25;
        else if (int j = idx(y); j >= 0)
          lap(i, j) -= 0.25;
      }
    const Eigen::VectorXd h = lap.fullPivLu().solve(rhs);
    auto hval = [&](Key y) {
      if (!dom.contains(lat.unpack(y))) return 1.0;
      const int j = idx(y);
      return j < 0 ? 0.0 : h(j);
    };
    // transformed chain on the states, killed on exit
    Eigen::MatrixXd pt = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int dir = 0; dir < 2 * dim; ++dir) {
        const Key y = lat.step(states[i], dir);
        if (const int j = idx(y); j >= 0) pt(i, j) += 0.25 * h(j) / h(i);
      }
    const Eigen::MatrixXd gt = (Eigen::MatrixXd::Identity(n, n) - pt).inverse();
    const Key x0 = alpha.back();
    double hplus = 0;
    for (int dir = 0; dir < 2 * dim; ++dir) hplus += 0.25 * hval(lat.step(x0, dir));
    Eigen::RowVectorXd first = Eigen::RowVectorXd::Zero(n);
    for (int dir = 0; dir < 2 * dim; ++dir) {
      const Key y = lat.step(x0, dir);
      if (const int j = idx(y); j >= 0) first(j) += 0.25 * h(j) / hplus;
    }
    const Eigen::RowVectorXd want = first * gt;

    std::vector<Point> targets;
    for (Key k : states) targets.push_back(lat.unpack(k));
    const std::vector<double> got = gtilde(box, alpha, targets);
    for (int i = 0; i < n; ++i) CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(want(i)).epsilon(1e-10));

    // and the rejection sampler's occupation counts
    RngStream rng(21, 1);
    const int runs = 100000;
    std::vector<double> s(static_cast<std::size_t>(n), 0.0), s2(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < runs; ++r) {
      std::vector<double> v(static_cast<std::size_t>(n), 0.0);
      const ConditionedOutcome c = run_conditioned_walk(lat.unpack(x0), a, dom, 1000000, rng);
      for (Key k : c.walk.path.v)
        if (const int j = idx(k); j >= 0) v[static_cast<std::size_t>(j)] += 1;
      for (int j = 0; j < n; ++j) {
        s[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
        s2[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
      }
    }
    int outside = 0;
    for (int j = 0; j < n; ++j) {
      const double mean = s[static_cast<std::size_t>(j)] / runs;
      const double se = std::sqrt(std::max(s2[static_cast<std::size_t>(j)] / runs - mean * mean, 0.0) / runs);
      outside += std::abs(mean - want(j)) > 4 * se + 1e-12;
    }
    CHECK(outside <= 1);
  }
}
