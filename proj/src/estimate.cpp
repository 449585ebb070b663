#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "heavytail/errors.hpp"
#include "heavytail/estimate.hpp"

namespace heavytail {

namespace {

void mark_low_count(TailReport& report, std::size_t hits) {
  report.meta["exceedances"] = static_cast<double>(hits);
  if (hits < kLowCountThreshold) report.flags.emplace_back(kLowCountFlag);
}

TailReport scaled_binomial(std::size_t hits, std::size_t n, double scale) {
  TailReport r;
  r.n = n;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  r.value = scale * p;
  r.se = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  mark_low_count(r, hits);
  return r;
}

std::vector<double> sorted_descending(std::span<const double> samples) {
  std::vector<double> s(samples.begin(), samples.end());
  for (double v : s) {
    if (!(v > 0.0)) throw ValidationError("requires positive data");
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

TailReport hill_on_sorted(const std::vector<double>& s, std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (k + 1 > s.size()) throw ValidationError("k too large");
  const double base = s[k];
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(s[i] / base);
  if (!(sum > 0.0)) throw NumericalError("degenerate tail");
  TailReport r;
  r.value = static_cast<double>(k) / sum;
  r.se = r.value / std::sqrt(static_cast<double>(k));
  r.n = s.size();
  r.meta["k"] = static_cast<double>(k);
  return r;
}

Vector cell_representative(const AngularSet& cell, Eigen::Index d) {
  if (!cell.balls.empty()) return cell.balls.front().center;
  if (!cell.orthants.empty()) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = cell.orthants.front().signs[static_cast<std::size_t>(i)];
    if (sup_norm(v) > 0.0) return v;
  }
  Vector v = Vector::Zero(d);
  v(0) = 1.0;
  return v;
}

// Indices of the k largest-norm non-zero samples, plus the zero count.
std::pair<std::vector<std::size_t>, std::size_t> top_k(std::span<const Vector> samples, std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
  std::vector<std::size_t> idx;
  std::vector<double> norm(samples.size());
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    norm[i] = sup_norm(samples[i]);
    if (norm[i] > 0.0) {
      idx.push_back(i);
    } else {
      ++zeros;
    }
  }
  if (idx.empty()) throw ValidationError("no angular data");
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return norm[a] > norm[b] || (norm[a] == norm[b] && a < b); });
  idx.resize(k);
  return {idx, zeros};
}

}  // namespace

bool TailReport::flagged(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::size_t default_k(std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 2.0 / 3.0) + 1e-9));
  return std::clamp<std::size_t>(k, 1, n > 1 ? n - 1 : 1);
}

TailReport hill_estimator(std::span<const double> samples, std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (k + 1 > samples.size()) throw ValidationError("k too large");
  return hill_on_sorted(sorted_descending(samples), k);
}

std::vector<TailReport> hill_plot(std::span<const double> samples, std::span<const std::size_t> ks) {
  const auto s = sorted_descending(samples);
  std::vector<TailReport> out;
  for (auto k : ks) out.push_back(hill_on_sorted(s, k));
  return out;
}

std::size_t face_cell(const Vector& x) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (std::abs(x(i)) > std::abs(x(best))) best = i;
  }
  return 2 * static_cast<std::size_t>(best) + (x(best) < 0.0 ? 1 : 0);
}

SpectralEstimate empirical_spectral_measure(std::span<const Vector> samples, std::size_t k) {
  if (samples.empty()) throw ValidationError("no angular data");
  const auto d = samples.front().size();
  const auto [idx, zeros] = top_k(samples, k);
  SpectralEstimate out;
  out.zero_dropped = zeros;
  out.counts.assign(2 * static_cast<std::size_t>(d), 0);
  for (auto i : idx) ++out.counts[face_cell(samples[i])];
  out.used = idx.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (int sign : {1, -1}) {
      Vector e = Vector::Zero(d);
      e(i) = sign;
      const auto cell = 2 * static_cast<std::size_t>(i) + (sign < 0 ? 1 : 0);
      out.measure.atoms.push_back({e, static_cast<double>(out.counts[cell]) / static_cast<double>(out.used)});
    }
  }
  return out;
}

SpectralEstimate empirical_spectral_measure(std::span<const Vector> samples, std::size_t k,
                                            const std::vector<AngularSet>& cells) {
  if (samples.empty()) throw ValidationError("no angular data");
  if (cells.empty()) throw ValidationError("at least one angular cell required");
  const auto d = samples.front().size();
  const auto [idx, zeros] = top_k(samples, k);
  SpectralEstimate out;
  out.zero_dropped = zeros;
  out.counts.assign(cells.size(), 0);
  for (auto i : idx) {
    const Vector w = direction(samples[i]);
    bool assigned = false;
    for (std::size_t c = 0; c < cells.size() && !assigned; ++c) {
      if (cells[c].contains(w)) {
        ++out.counts[c];
        assigned = true;
      }
    }
    if (assigned) {
      ++out.used;
    } else {
      ++out.unassigned;
    }
  }
  if (out.used == 0) throw ValidationError("no angular data");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out.measure.atoms.push_back(
        {cell_representative(cells[c], d), static_cast<double>(out.counts[c]) / static_cast<double>(out.used)});
  }
  return out;
}

TailReport empirical_cone_measure(std::span<const Vector> samples, const ConeSet& cone, double alpha) {
  if (samples.empty()) throw ValidationError("no samples");
  if (!(cone.level > 0.0)) throw ValidationError("cone level must be positive");
  std::size_t hits = 0;
  std::size_t zeros = 0;
  for (const auto& x : samples) {
    if (sup_norm(x) == 0.0) ++zeros;
    if (cone.contains(x)) ++hits;
  }
  auto r = scaled_binomial(hits, samples.size(), std::pow(cone.level, alpha));
  r.meta["t"] = cone.level;
  r.meta["zero_samples"] = static_cast<double>(zeros);
  return r;
}

TailReport projection_tail(std::span<const Vector> samples, const Vector& y, double t, double alpha) {
  if (samples.empty()) throw ValidationError("no samples");
  if (!(t > 0.0)) throw ValidationError("level must be positive");
  if (sup_norm(y) == 0.0) throw ValidationError("projection vector must be non-zero");
  std::size_t hits = 0;
  for (const auto& x : samples) {
    if (x.dot(y) > t) ++hits;
  }
  auto r = scaled_binomial(hits, samples.size(), std::pow(t, alpha));
  r.meta["t"] = t;
  return r;
}

}  // namespace heavytail
