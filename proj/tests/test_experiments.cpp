#include "doctest.h"

#include <set>
#include <sstream>

#include "usf/experiments.hpp"

using namespace usf;

namespace {
std::string csv(const Record& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}
RunOpts opts(Exec e, std::uint64_t seed = 3) { return RunOpts{seed, e}; }
}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("two-point at r = 0 and the CSV shape") {
    const TwoPointResult r = exp_two_point(5, 8, {0, 1, 2, 4}, 300, opts(Exec::openmp));
    REQUIRE(r.p.size() == 4);
    CHECK(r.p[0].value == 1.0);
    for (std::size_t i = 1; i < r.p.size(); ++i) CHECK(r.p[i].value <= 1.0);
    const std::string s = csv(to_record(r, 5, 3));
    CHECK(s.rfind("d,N,r,quantity,estimate,stderr,ci_lo,ci_hi,n_samples,seed,code_version\n", 0) == 0);
    CHECK(s.find("fit_power_slope") != std::string::npos);
  }

  TEST_CASE("serial and OpenMP replicas agree bit for bit") {
    const auto a = exp_two_point(5, 8, {1, 2, 4}, 200, opts(Exec::serial));
    const auto b = exp_two_point(5, 8, {1, 2, 4}, 200, opts(Exec::openmp));
    CHECK(csv(to_record(a, 5, 3)) == csv(to_record(b, 5, 3)));
    const auto l1 = exp_lerw_length(5, 4, {0.2}, {1.0}, 200, opts(Exec::serial));
    const auto l2 = exp_lerw_length(5, 4, {0.2}, {1.0}, 200, opts(Exec::openmp));
    CHECK(l1.lengths == l2.lengths);
    const auto v1 = exp_box_volume(5, 2, {0.5}, 20, opts(Exec::serial));
    const auto v2 = exp_box_volume(5, 2, {0.5}, 20, opts(Exec::openmp));
    CHECK(v1.volumes == v2.volumes);
    const auto s1 = exp_ball(5, {2}, {1.0}, {0.5}, 30, opts(Exec::serial));
    const auto s2 = exp_ball(5, {2}, {1.0}, {0.5}, 30, opts(Exec::openmp));
    CHECK(s1[0].volumes == s2[0].volumes);
    CHECK(csv(to_record(s1, 5, 3)) == csv(to_record(s2, 5, 3)));
  }

  TEST_CASE("seeds matter") {
    const auto a = exp_lerw_length(5, 4, {0.2}, {1.0}, 100, opts(Exec::serial, 1));
    const auto b = exp_lerw_length(5, 4, {0.2}, {1.0}, 100, opts(Exec::serial, 2));
    CHECK(a.lengths != b.lengths);
  }

  TEST_CASE("box volume contains the origin and uses the dense kernel consistently") {
    const auto r = exp_box_volume(5, 3, {1.0, 0.5, 0.25}, 10, opts(Exec::serial, 9));
    for (auto v : r.volumes) CHECK(v >= 1);
    CHECK(r.median_scaled > 0);
    for (const auto& t : r.lower) CHECK(t.p.value <= 1.0);
  }

  TEST_CASE("ball volumes and containment") {
    const auto r = exp_ball(5, {1, 3}, {1.0}, {0.5}, 50, opts(Exec::serial));
    REQUIRE(r.size() == 2);
    for (const auto& b : r) {
      CHECK(b.containment_violations == 0);
      for (auto v : b.volumes) CHECK(v >= 1);
    }
  }

  TEST_CASE("pair length profile is monotone in n") {
    const auto r = exp_path_length_pair(Point{2, 0, 0, 0, 0}, {1, 2, 4, 8, 16, 1 << 20}, 3000, opts(Exec::openmp));
    for (std::size_t i = 1; i < r.p.size(); ++i) CHECK(r.p[i].value >= r.p[i - 1].value);
    CHECK(r.p.back().value == doctest::Approx(r.plateau.value));
    CHECK(r.p[0].value == 0.0);  // |x| = 2 needs two steps
    CHECK(std::abs(r.plateau.value - r.green_ratio) < 3 * r.plateau.stderr_ + r.escape_bias * r.green_ratio);
  }

  TEST_CASE("separation event is frequent in d = 5") {
    const auto r = exp_separation(5, 8, 2000, opts(Exec::openmp));
    CHECK(r.acceptance.value > 0.3);
    CHECK(r.conditional.value >= 0.01);
  }

  TEST_CASE("shell geometry validation") {
    ShellGeometry g;
    g.n = 8;
    g.m = 4;
    g.N = 16;
    CHECK_FALSE(g.in_regime());
    try {
      g.validate();
      FAIL("expected a geometry error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::geometry);
    }
    g.override_regime = true;
    CHECK_NOTHROW(g.validate());
    ShellGeometry ok;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.k_shells() >= 1);
  }

  TEST_CASE("shell samples keep empty intersections and replay") {
    ShellGeometry g;
    int empty = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
      const ShellSample a = shell_sample(g, 5, s);
      const ShellSample b = shell_sample(g, 5, s);
      CHECK(a.hits == b.hits);
      CHECK(a.capacity == b.capacity);
      CHECK(a.x2_hit >= 0.0);
      CHECK(a.x2_hit <= 1.0);
      if (a.hits == 0) {
        ++empty;
        CHECK(a.capacity == 0.0);
        CHECK(a.x2_hit == 0.0);
      }
    }
    const ShellResult r = exp_shell(g, 40, opts(Exec::serial, 5), ShellOpts{20});
    CHECK(r.samples == 40);
    CHECK(r.cap_zero.value == doctest::Approx(empty / 40.0));
  }

  TEST_CASE("topologies") {
    const std::size_t want[] = {1, 3, 15, 105, 945};
    for (int k = 1; k <= 5; ++k) {
      const auto ts = enumerate_topologies(k);
      CHECK(ts.size() == want[k - 1]);
      std::set<std::string> distinct;
      for (const auto& t : ts) {
        CHECK(t.valid());
        CHECK(t.edges.size() == static_cast<std::size_t>(2 * k + 1));
        distinct.insert(t.to_string());
      }
      CHECK(distinct.size() == ts.size());
    }
    CHECK_THROWS_AS(enumerate_topologies(9), Error);
  }

  TEST_CASE("number formatting") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0 / 3.0) == "0.3333333333");
  }
}
