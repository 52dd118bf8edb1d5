#include "doctest.h"

#include <cmath>

#include "usf/rng.hpp"
#include "usf/stats.hpp"

using namespace usf;

TEST_SUITE("stats") {
  TEST_CASE("frequency intervals") {
    const Estimate a = frequency_estimate(500, 1000);
    CHECK(a.value == doctest::Approx(0.5));
    CHECK(a.stderr_ == doctest::Approx(std::sqrt(0.25 / 1000)));
    CHECK(a.ci_lo < 0.5);
    CHECK(a.ci_hi > 0.5);
    const Estimate z = frequency_estimate(0, 100);
    CHECK(z.ci_lo == 0.0);
    CHECK(z.ci_hi == doctest::Approx(1 - std::pow(0.025, 0.01)).epsilon(1e-6));
    const Estimate one = frequency_estimate(100, 100);
    CHECK(one.ci_hi == 1.0);
    CHECK(one.ci_lo > 0.95);
  }

  TEST_CASE("means and tallies agree") {
    std::vector<double> xs{1, 2, 3, 4, 10};
    Tally t, u;
    for (std::size_t i = 0; i < xs.size(); ++i) (i < 2 ? t : u).add(xs[i]);
    t.merge(u);
    const Estimate a = mean_estimate(xs), b = t.estimate();
    CHECK(a.value == doctest::Approx(4.0));
    CHECK(b.value == doctest::Approx(4.0));
    CHECK(a.stderr_ == doctest::Approx(b.stderr_));
    CHECK(quantile({3, 1, 2}, 0.5) == doctest::Approx(2.0));
  }

  TEST_CASE("chi-square helpers") {
    CHECK(chi2_sf(0.0, 3) == doctest::Approx(1.0));
    CHECK(chi2_sf(7.814727903, 3) == doctest::Approx(0.05).epsilon(1e-6));
    const Chi2Result u = chi2_uniform({100, 100, 100, 100});
    CHECK(u.stat == 0.0);
    CHECK(u.dof == 3.0);
    const Chi2Result k = chi2_against({{0.5, 50}, {0.3, 30}, {0.2, 20}}, 100);
    CHECK(k.stat == doctest::Approx(0.0));
    CHECK(k.p == doctest::Approx(1.0));
    // the tiny cell joins the unlisted mass, which is then large enough to keep
    const Chi2Result pooled = chi2_against({{0.6, 600}, {0.39, 390}, {0.001, 1}}, 1000);
    CHECK(pooled.dof == 2.0);
    CHECK(pooled.p > 0.5);
  }

  TEST_CASE("two-sample KS") {
    RngStream rng(4, 4);
    std::vector<double> a, b, c;
    for (int i = 0; i < 2000; ++i) {
      a.push_back(rng.uniform01());
      b.push_back(rng.uniform01());
      c.push_back(rng.uniform01() * 0.8);
    }
    CHECK(ks_two_sample(a, b).p > 0.001);
    CHECK(ks_two_sample(a, c).p < 1e-6);
  }

  TEST_CASE("tail fits") {
    std::vector<FitPoint> pw;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) pw.push_back({x, {3.0 * std::pow(x, -1.7), 1e-3 * std::pow(x, -1.7), 100}});
    const FitResult f = fit_tail(pw, TailModel::power);
    CHECK(std::abs(f.slope + 1.7) < 1e-10);
    CHECK(std::abs(f.intercept - std::log(3.0)) < 1e-10);

    RngStream rng(5, 5);
    std::vector<FitPoint> ex;
    for (double x = 0.5; x <= 4.0; x += 0.5) {
      const double y = std::exp(-2 * x) * (1 + 0.01 * (2 * rng.uniform01() - 1) * std::sqrt(3.0));
      ex.push_back({x, {y, 0.01 * y, 1000}});
    }
    const FitResult e = fit_tail(ex, TailModel::exp);
    CHECK(-e.slope >= 1.8);
    CHECK(-e.slope <= 2.2);

    std::vector<FitPoint> st;
    for (double x : {0.1, 0.2, 0.4, 0.8}) st.push_back({x, {std::exp(-1.5 * std::pow(x, -0.2)), 1e-4, 100}});
    CHECK(fit_tail(st, TailModel::stretched, 0.2).slope == doctest::Approx(-1.5).epsilon(1e-6));

    std::vector<FitPoint> flat(4, FitPoint{2.0, {0.5, 0.01, 100}});
    CHECK_THROWS(fit_tail(flat, TailModel::power));
    CHECK_THROWS(fit_tail({pw[0], pw[1]}, TailModel::power));
    CHECK(model_name(TailModel::exp) == "exp");
  }
}
