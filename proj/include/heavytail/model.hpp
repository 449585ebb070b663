#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "heavytail/linalg.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr double kUnitSphereTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Regime chain
// ---------------------------------------------------------------------------

/// Row-stochastic, irreducible transition matrix over the regime set together
/// with its stationary distribution. Only constructible through validation.
class TransitionMatrix {
 public:
  /// Validates `h` (square, non-negative, rows summing to one, irreducible)
  /// and solves for the stationary distribution.
  static TransitionMatrix from_matrix(const Matrix& h);

  const Matrix& h() const { return h_; }
  const Vector& pi() const { return pi_; }
  std::size_t size() const { return static_cast<std::size_t>(h_.rows()); }

  /// Time-reversed kernel H*(i,j) = pi_j H(j,i) / pi_i.
  const Matrix& reversed() const { return reversed_; }

  /// Draw from pi.
  int sample_stationary(Rng& rng) const { return sample_row(pi_cdf_, rng); }
  /// One forward step from `state`.
  int step_forward(int state, Rng& rng) const { return sample_row(forward_cdf_[state], rng); }
  /// One step of the reversed chain, i.e. the regime one unit further in the past.
  int step_backward(int state, Rng& rng) const { return sample_row(backward_cdf_[state], rng); }

 private:
  static int sample_row(const std::vector<double>& cdf, Rng& rng);

  Matrix h_;
  Vector pi_;
  Matrix reversed_;
  std::vector<double> pi_cdf_;
  std::vector<std::vector<double>> forward_cdf_;
  std::vector<std::vector<double>> backward_cdf_;
};

/// Stationary distribution of a row-stochastic irreducible matrix.
Vector stationary_distribution(const Matrix& h);

/// True iff the support graph of `h` is strongly connected.
bool is_irreducible(const Matrix& h);

// ---------------------------------------------------------------------------
// Coefficient laws
// ---------------------------------------------------------------------------

struct WeightedDirection {
  Vector direction;
  double weight = 0.0;
};

/// Finitely many weighted directions on the sup-norm unit sphere.
struct AtomicSpectralMeasure {
  std::vector<WeightedDirection> atoms;

  double total_weight() const;
};

/// Q = R·W + B: Pareto(alpha, scale) radius R, direction W drawn from the
/// atoms by weight, B uniform on [-perturbation, perturbation]^d.
struct ParetoInnovation {
  AtomicSpectralMeasure atoms;
  double scale = 1.0;
  double perturbation = 0.0;
};

/// Q fixed at a given vector. Not regularly varying; used to exercise the
/// recursion with deterministic or vanishing innovations.
struct ConstantInnovation {
  Vector value;
};

using InnovationLaw = std::variant<ParetoInnovation, ConstantInnovation>;

struct DeterministicMatrix {
  Matrix value;
};

/// M = U·base with U uniform on [low, high], 0 < low <= high.
struct ScalarRandomMatrix {
  Matrix base;
  double low = 1.0;
  double high = 1.0;
};

/// Entry (r,c) uniform on [low(r,c), high(r,c)], independently.
struct RandomEntriesMatrix {
  Matrix low;
  Matrix high;
};

using MatrixLaw = std::variant<DeterministicMatrix, ScalarRandomMatrix, RandomEntriesMatrix>;

struct RegimeLaw {
  InnovationLaw innovation;
  MatrixLaw matrix;
  /// Radius and matrix scale share one uniform variate (scalar-random only).
  bool coupled = false;
};

/// Upper bound on op_norm(M) over the support of `law`.
double op_norm_bound(const MatrixLaw& law);

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

/// Validated description of the regime-driven recursion X_n = Q_n + M_n X_{n-1}.
class ModelSpec {
 public:
  ModelSpec(int d, double alpha, double beta, std::vector<RegimeLaw> regimes, const Matrix& h);

  int d() const { return d_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<RegimeLaw>& regimes() const { return regimes_; }
  const RegimeLaw& regime(int i) const { return regimes_[static_cast<std::size_t>(i)]; }
  std::size_t regime_count() const { return regimes_.size(); }
  const TransitionMatrix& chain() const { return chain_; }

  /// True when every regime carries a Pareto innovation law.
  bool regularly_varying() const;

 private:
  int d_;
  double alpha_;
  double beta_;
  std::vector<RegimeLaw> regimes_;
  TransitionMatrix chain_;
};

/// Checks one innovation law against dimension d.
void validate_innovation(const InnovationLaw& law, int d);
/// Checks one matrix law against dimension d.
void validate_matrix_law(const MatrixLaw& law, int d);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draws Q from an innovation law in place. `radial_uniform`, if non-null,
/// receives the (0,1] variate behind the Pareto radius.
void sample_innovation(const InnovationLaw& law, double alpha, Rng& rng, Vector& q,
                       double* radial_uniform = nullptr);

/// Draws M from a matrix law in place. `shared_uniform` replaces the scalar
/// factor's own variate when set (coupled regimes).
void sample_matrix(const MatrixLaw& law, Rng& rng, Matrix& m,
                   std::optional<double> shared_uniform = std::nullopt);

/// Draws the coefficient pair (Q_{n,i}, M_{n,i}) of one regime in place.
/// Draw order: radius, atom, perturbation, then the matrix.
void sample_regime_pair(const RegimeLaw& regime, double alpha, Rng& rng, Vector& q, Matrix& m);

struct CoefficientPair {
  Vector q;
  Matrix m;
};

CoefficientPair sample_regime_pair(const ModelSpec& spec, int regime, Rng& rng);

}  // namespace heavytail
