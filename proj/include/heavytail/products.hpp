#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "heavytail/linalg.hpp"
#include "heavytail/model.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/stats.hpp"

namespace heavytail {

/// Running product kept as exp(log_scale) · matrix. The matrix is rescaled to
/// op_norm 1 whenever its norm leaves [1e-150, 1e150].
class ProductAccumulator {
 public:
  static constexpr double kLow = 1e-150;
  static constexpr double kHigh = 1e150;

  explicit ProductAccumulator(int d) : running_(Matrix::Identity(d, d)), scratch_(d, d) {}

  /// running <- running · factor
  void multiply_right(const Matrix& factor);

  const Matrix& matrix() const { return running_; }
  double log_scale() const { return log_scale_; }
  /// log op_norm of the full product; -inf once the product vanishes.
  double log_norm() const;

 private:
  Matrix running_;
  Matrix scratch_;
  double log_scale_ = 0.0;
};

/// Product of `factors` consecutive coefficient matrices along a stationary
/// regime path: M_0 M_{-1} ... M_{-(m-1)}; the empty product is the identity.
struct ProductSample {
  Matrix matrix;             // product / exp(log_scale)
  double log_scale = 0.0;    // zero unless rescaling happened
  int factors = 0;
  double log_norm = 0.0;
  std::vector<int> states;   // states[j] is the regime at time -j
};

ProductSample product_sample(const ModelSpec& spec, int m, Rng& rng);

/// log op_norm of the m-factor product for every replica, m = 1..m_max, on
/// common random numbers: row m-1 of replica r extends row m-2. Stored
/// replica-major: logs[r * m_max + (m-1)].
std::vector<double> log_norm_table(const ModelSpec& spec, int m_max, std::size_t reps, Seed seed, Exec exec);

/// Column m (1-based) of a replica-major log-norm table.
std::vector<double> table_column(const std::vector<double>& table, int m_max, int m);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Top Lyapunov exponent: mean of log_norm / n over replicas.
Estimate lyapunov_estimate(const ModelSpec& spec, int n, std::size_t reps, Seed seed, Exec exec = {});

/// (1/n) log of the Monte Carlo mean of ‖Π‖^beta; se by the delta method.
/// Throws NumericalError when one replica carries more than 99% of the mass.
Estimate lambda_beta_estimate(const ModelSpec& spec, double beta, int n, std::size_t reps, Seed seed,
                              Exec exec = {});

/// Same estimators over an existing set of log norms (fixed replica set).
Estimate lyapunov_from_logs(std::span<const double> logs, int n);
Estimate lambda_beta_from_logs(std::span<const double> logs, double beta, int n);

struct MomentRow {
  int m = 0;
  double moment_alpha = 0.0;
  double se_alpha = 0.0;
  double moment_beta = 0.0;
  double se_beta = 0.0;
};

/// Evidence that E‖Π^{(m)}‖^alpha and E‖Π^{(m)}‖^beta are both below one by
/// at least two standard errors.
struct ContractionWitness {
  MomentRow row;

  int m() const { return row.m; }
};

struct ContractionScan {
  std::vector<MomentRow> rows;
  std::optional<ContractionWitness> witness;
};

/// Moment scan over m = 1..m_max; the witness is the smallest qualifying m.
/// An unstable moment before the witness throws; after it, the scan stops.
ContractionScan find_contraction_m(const ModelSpec& spec, int m_max, std::size_t reps, Seed seed,
                                   Exec exec = {});

struct LogMomentCheck {
  bool ok = false;
  MeanSe log_plus_matrix;
  MeanSe log_plus_innovation;
  MeanSe log_plus_innovation_half;  // first reps/2 draws
};

/// Sample means of log⁺‖M_0‖ and log⁺‖Q_0‖ under the stationary regime mix;
/// ok when the innovation estimate from reps and from reps/2 agree within
/// three combined standard errors.
LogMomentCheck check_log_moments(const ModelSpec& spec, std::size_t reps, Seed seed, Exec exec = {});

struct HorizonEstimate {
  int n = 0;
  Estimate lambda_beta;
  bool stable = true;  // false when one replica dominates the moment (> 99%)
};

struct AssumptionReport {
  Estimate lyapunov;
  bool a2_satisfied = false;  // lyapunov + 3 se < 0
  Estimate lambda_beta;
  std::vector<HorizonEstimate> lambda_beta_by_horizon;
  bool lambda_beta_monotone = true;  // over stable horizons only
  std::optional<int> contraction_m;
  bool log_moment_ok = false;
  LogMomentCheck log_moments;
  std::vector<MomentRow> moment_rows;
  std::optional<ContractionWitness> witness;
};

struct AssumptionOptions {
  int horizon = 100;
  std::size_t reps = 10000;
  int m_max = 20;
};

AssumptionReport verify_assumptions(const ModelSpec& spec, const AssumptionOptions& opts, Seed seed,
                                    Exec exec = {});

}  // namespace heavytail
