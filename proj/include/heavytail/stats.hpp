#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace heavytail {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error (sample sd / sqrt(n)), summed in order.
MeanSe mean_se(std::span<const double> values);

/// Monte Carlo estimate of E exp(power · L) from samples of L, reduced in the
/// log domain so that huge or tiny exponents neither overflow nor underflow.
struct MomentEstimate {
  double log_mean = 0.0;   // log of the sample mean of exp(power·L)
  double mean = 0.0;       // exp(log_mean), may be 0 or inf
  double se = 0.0;         // standard error of `mean`
  double rel_se = 0.0;     // se / mean, i.e. the delta-method se of log_mean
  double dominance = 0.0;  // largest single term over the sum
};

MomentEstimate moment_from_logs(std::span<const double> logs, double power);

/// Limiting Kolmogorov survival function P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;

  bool accepts(double level) const { return pvalue > level; }
};

/// One-sample Kolmogorov-Smirnov test against a continuous cdf.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace heavytail
