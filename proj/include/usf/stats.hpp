#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace usf {

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_samples = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Frequency k/n. Normal interval, or Clopper-Pearson when n*p < 10 or
/// n*(1-p) < 10; clipped to [0,1].
Estimate frequency_estimate(std::uint64_t k, std::uint64_t n);
Estimate mean_estimate(const std::vector<double>& xs);

/// Count, sum and sum of squares; merging is associative.
struct Tally {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  void merge(const Tally& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  Estimate estimate() const;
};

double chi2_sf(double stat, double dof);
/// Pearson statistic and p-value against a uniform law over counts.size() cells.
struct Chi2Result {
  double stat = 0.0;
  double dof = 0.0;
  double p = 0.0;
};
Chi2Result chi2_uniform(const std::vector<std::uint64_t>& counts);

/// Pearson statistic against known cell probabilities. Cells with expected
/// count below min_expected are pooled together with the unlisted mass; a
/// pooled cell that is still too small is merged into the smallest listed cell.
Chi2Result chi2_against(const std::vector<std::pair<double, std::uint64_t>>& p_and_counts, std::uint64_t total,
                        double min_expected = 5.0);

/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
struct KsResult {
  double d = 0.0;
  double p = 0.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double quantile(std::vector<double> xs, double q);

enum class TailModel { power, exp, stretched };

struct FitPoint {
  double x = 0.0;
  Estimate y;
};

struct FitResult {
  TailModel model = TailModel::power;
  double gamma = 0.0;      // stretch exponent, stretched model only
  double slope = 0.0;      // lead parameter of the linearised model
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double residual = 0.0;   // weighted residual sum of squares
  std::vector<double> used_x;
};

/// Weighted least squares on log y against log x (power), x (exp) or
/// x^{-gamma} (stretched). For exp and stretched, slope is -rate.
/// Points with y <= 0 or stderr/y >= 0.5 are dropped; needs 3 left.
FitResult fit_tail(const std::vector<FitPoint>& pts, TailModel model, double gamma = 0.0);

std::string model_name(TailModel m);

}  // namespace usf
