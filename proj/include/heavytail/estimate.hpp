#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heavytail/cone.hpp"
#include "heavytail/linalg.hpp"
#include "heavytail/model.hpp"

namespace heavytail {

inline constexpr std::size_t kLowCountThreshold = 20;
inline constexpr const char* kLowCountFlag = "low-count";

/// Estimate, standard error and sample count for any tail quantity.
struct TailReport {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::map<std::string, double> meta;
  std::vector<std::string> flags;

  bool flagged(std::string_view flag) const;
};

/// floor(n^{2/3}), clamped to [1, n-1].
std::size_t default_k(std::size_t n);

/// Hill estimate of the tail index from the k largest of `samples`:
/// 1 / mean_{i<=k} log(X_(i) / X_(k+1)), se = estimate / sqrt(k).
TailReport hill_estimator(std::span<const double> samples, std::size_t k);

/// Hill estimates for several k on one sort of the data.
std::vector<TailReport> hill_plot(std::span<const double> samples, std::span<const std::size_t> ks);

struct SpectralEstimate {
  AtomicSpectralMeasure measure;      // one atom per cell, weights sum to 1
  std::vector<std::size_t> counts;    // per cell
  std::size_t used = 0;               // directions assigned to a cell
  std::size_t unassigned = 0;         // top-k directions outside every cell
  std::size_t zero_dropped = 0;       // zero vectors skipped
};

/// Face cell of a non-zero vector: 2i for +e_i, 2i+1 for -e_i, where i is
/// the coordinate of largest magnitude (lowest index on ties).
std::size_t face_cell(const Vector& x);

/// Directions of the k largest-norm samples aggregated over the 2d sup-norm faces.
SpectralEstimate empirical_spectral_measure(std::span<const Vector> samples, std::size_t k);

/// Same over caller-supplied cells; each atom is placed at the cell's first
/// ball centre (or its first orthant's sign vector).
SpectralEstimate empirical_spectral_measure(std::span<const Vector> samples, std::size_t k,
                                            const std::vector<AngularSet>& cells);

/// level^alpha · #{i : x_i ∈ cone} / n with binomial se.
TailReport empirical_cone_measure(std::span<const Vector> samples, const ConeSet& cone, double alpha);

/// t^alpha · #{i : x_i · y > t} / n with binomial se.
TailReport projection_tail(std::span<const Vector> samples, const Vector& y, double t, double alpha);

}  // namespace heavytail
