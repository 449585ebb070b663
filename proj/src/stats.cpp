#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/stats.hpp"

namespace heavytail {

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  const auto n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

MomentEstimate moment_from_logs(std::span<const double> logs, double power) {
  MomentEstimate out;
  const auto n = logs.size();
  if (n == 0) return out;
  double peak = -std::numeric_limits<double>::infinity();
  for (double l : logs) peak = std::max(peak, power * l);
  if (peak == -std::numeric_limits<double>::infinity()) {
    out.log_mean = peak;
    return out;
  }
  double sum = 0.0;
  double largest = 0.0;
  for (double l : logs) {
    const double w = std::exp(power * l - peak);
    sum += w;
    largest = std::max(largest, w);
  }
  const double nd = static_cast<double>(n);
  const double mean_w = sum / nd;
  double ss = 0.0;
  for (double l : logs) {
    const double w = std::exp(power * l - peak);
    ss += (w - mean_w) * (w - mean_w);
  }
  const double se_w = n > 1 ? std::sqrt(ss / (nd - 1.0) / nd) : 0.0;
  out.log_mean = peak + std::log(mean_w);
  out.mean = std::exp(out.log_mean);
  out.rel_se = se_w / mean_w;
  out.se = out.mean * out.rel_se;
  out.dominance = largest / sum;
  return out;
}

double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form converges much faster there.
    const double c = -M_PI * M_PI / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 50; k += 2) cdf += std::exp(c * k * k);
    cdf *= std::sqrt(2.0 * M_PI) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

double ks_pvalue(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_pvalue(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_pvalue(d, na * nb / (na + nb))};
}

}  // namespace heavytail
