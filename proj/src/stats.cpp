#include "usf/stats.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "usf/error.hpp"

namespace usf {

namespace {
constexpr double kZ = 1.959963984540054;
}

Estimate frequency_estimate(std::uint64_t k, std::uint64_t n) {
  require(n > 0, "frequency of zero samples");
  require(k <= n, "more successes than samples");
  Estimate e;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  e.value = p;
  e.n_samples = n;
  e.stderr_ = std::sqrt(p * (1 - p) / nn);
  if (nn * p < 10 || nn * (1 - p) < 10) {
    const double a = 0.025;
    e.ci_lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(double(k), double(n - k + 1)), a);
    e.ci_hi = k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<>(double(k + 1), double(n - k)), 1 - a);
  } else {
    e.ci_lo = std::max(0.0, p - kZ * e.stderr_);
    e.ci_hi = std::min(1.0, p + kZ * e.stderr_);
  }
  return e;
}

Estimate Tally::estimate() const {
  Estimate e;
  e.n_samples = n;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  e.value = sum / nn;
  const double var = n > 1 ? std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1)) : 0.0;
  e.stderr_ = std::sqrt(var / nn);
  e.ci_lo = e.value - kZ * e.stderr_;
  e.ci_hi = e.value + kZ * e.stderr_;
  return e;
}

Estimate mean_estimate(const std::vector<double>& xs) {
  Tally t;
  for (double x : xs) t.add(x);
  return t.estimate();
}

double chi2_sf(double stat, double dof) {
  require(dof > 0, "chi-square needs positive degrees of freedom");
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(dof), stat));
}

Chi2Result chi2_uniform(const std::vector<std::uint64_t>& counts) {
  require(counts.size() >= 2, "chi-square needs two cells");
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expect = total / static_cast<double>(counts.size());
  Chi2Result r;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expect;
    r.stat += diff * diff / expect;
  }
  r.dof = static_cast<double>(counts.size() - 1);
  r.p = chi2_sf(r.stat, r.dof);
  return r;
}

Chi2Result chi2_against(const std::vector<std::pair<double, std::uint64_t>>& p_and_counts, std::uint64_t total,
                        double min_expected) {
  require(total > 0, "chi-square needs samples");
  const double n = static_cast<double>(total);
  std::vector<std::pair<double, double>> cells;  // expected, observed
  double pool_e = n, pool_o = n;
  for (const auto& [p, c] : p_and_counts)
    if (p * n >= min_expected) {
      cells.emplace_back(p * n, static_cast<double>(c));
      pool_e -= p * n;
      pool_o -= static_cast<double>(c);
    }
  pool_e = std::max(0.0, pool_e);
  if (pool_e >= min_expected || cells.empty()) {
    cells.emplace_back(pool_e, pool_o);
  } else if (pool_e > 0 || pool_o > 0) {
    auto& smallest = *std::min_element(cells.begin(), cells.end());
    smallest.first += pool_e;
    smallest.second += pool_o;
  }
  require(cells.size() >= 2, "chi-square needs two usable cells");
  Chi2Result r;
  for (const auto& [e, o] : cells) {
    if (e <= 0) {
      if (o > 0) r.stat = std::numeric_limits<double>::infinity();
      continue;
    }
    r.stat += (o - e) * (o - e) / e;
  }
  r.dof = static_cast<double>(cells.size() - 1);
  r.p = std::isfinite(r.stat) ? chi2_sf(r.stat, r.dof) : 0.0;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "KS needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0;
  if (lam < 1e-3) {
    p = 1;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2 * ((k & 1) ? 1 : -1) * std::exp(-2 * lam * lam * k * k);
      p += term;
      if (std::abs(term) < 1e-12) break;
    }
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile of empty sample");
  require(q >= 0 && q <= 1, "quantile level outside [0,1]");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::string model_name(TailModel m) {
  switch (m) {
    case TailModel::power: return "power";
    case TailModel::exp: return "exp";
    case TailModel::stretched: return "stretched";
  }
  return "?";
}

FitResult fit_tail(const std::vector<FitPoint>& pts, TailModel model, double gamma) {
  if (model == TailModel::stretched) require(gamma > 0, "stretched model needs gamma > 0");
  std::vector<double> xs, ys, ws;
  bool exact = true;
  for (const auto& p : pts) {
    if (!(p.y.value > 0) || p.y.stderr_ / p.y.value >= 0.5) continue;
    if (model == TailModel::power && !(p.x > 0)) continue;
    if (model == TailModel::stretched && !(p.x > 0)) continue;
    double x = p.x;
    if (model == TailModel::power) x = std::log(p.x);
    if (model == TailModel::stretched) x = std::pow(p.x, -gamma);
    xs.push_back(x);
    ys.push_back(std::log(p.y.value));
    const double rel = p.y.stderr_ / p.y.value;
    ws.push_back(rel > 0 ? 1.0 / (rel * rel) : 0.0);
    exact = exact && rel == 0;
  }
  if (xs.size() < 3) fail(ErrorKind::invalid_argument, "fit needs at least 3 usable points");
  // Zero-noise points all get unit weight; mixed sets give exact points the largest weight seen.
  double wmax = 0;
  for (double w : ws) wmax = std::max(wmax, w);
  for (double& w : ws)
    if (w == 0) w = exact ? 1.0 : wmax;

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += ws[i];
    sx += ws[i] * xs[i];
    sy += ws[i] * ys[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 1e-14 * sw * (1 + mx * mx))) fail(ErrorKind::invalid_argument, "degenerate fit design");
  FitResult r;
  r.model = model;
  r.gamma = gamma;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - r.intercept - r.slope * xs[i];
    r.residual += ws[i] * e * e;
  }
  if (exact) {
    const double dof = static_cast<double>(xs.size()) - 2;
    r.slope_stderr = std::sqrt(r.residual / dof / sxx);
  } else {
    r.slope_stderr = std::sqrt(1.0 / sxx);
  }
  r.ci_lo = r.slope - kZ * r.slope_stderr;
  r.ci_hi = r.slope + kZ * r.slope_stderr;
  for (const auto& p : pts)
    if (p.y.value > 0 && p.y.stderr_ / p.y.value < 0.5 && (model == TailModel::exp || p.x > 0)) r.used_x.push_back(p.x);
  return r;
}

}  // namespace usf
