#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"
#include "heavytail/products.hpp"

namespace heavytail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dominance(const MomentEstimate& est, std::size_t reps) {
  if (reps >= 2 && est.dominance > 0.99) {
    throw NumericalError("moment estimate unstable: increase reps");
  }
}

bool below_one(double mean, double se) { return mean + 2.0 * se < 1.0; }

}  // namespace

void ProductAccumulator::multiply_right(const Matrix& factor) {
  scratch_.noalias() = running_ * factor;
  running_.swap(scratch_);
  const double norm = op_norm(running_);
  if (norm > 0.0 && (norm < kLow || norm > kHigh)) {
    running_ /= norm;
    log_scale_ += std::log(norm);
  }
}

double ProductAccumulator::log_norm() const {
  const double norm = op_norm(running_);
  return norm > 0.0 ? log_scale_ + std::log(norm) : kNegInf;
}

ProductSample product_sample(const ModelSpec& spec, int m, Rng& rng) {
  if (m < 0) throw ValidationError("factor count must be non-negative");
  ProductSample out;
  out.factors = m;
  ProductAccumulator acc(spec.d());
  Vector q;
  Matrix factor;
  int z = spec.chain().sample_stationary(rng);
  for (int j = 0; j < m; ++j) {
    if (j > 0) z = spec.chain().step_backward(z, rng);
    out.states.push_back(z);
    sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, factor);
    acc.multiply_right(factor);
  }
  out.matrix = acc.matrix();
  out.log_scale = acc.log_scale();
  out.log_norm = acc.log_norm();
  return out;
}

std::vector<double> log_norm_table(const ModelSpec& spec, int m_max, std::size_t reps, Seed seed, Exec exec) {
  if (m_max < 1) throw ValidationError("m_max must be at least 1");
  const auto width = static_cast<std::size_t>(m_max);
  std::vector<double> table(reps * width);
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    ProductAccumulator acc(spec.d());
    Vector q;
    Matrix factor;
    int z = spec.chain().sample_stationary(rng);
    for (std::size_t j = 0; j < width; ++j) {
      if (j > 0) z = spec.chain().step_backward(z, rng);
      sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, factor);
      acc.multiply_right(factor);
      table[r * width + j] = acc.log_norm();
    }
  });
  return table;
}

std::vector<double> table_column(const std::vector<double>& table, int m_max, int m) {
  const auto width = static_cast<std::size_t>(m_max);
  const std::size_t reps = table.size() / width;
  std::vector<double> col(reps);
  for (std::size_t r = 0; r < reps; ++r) col[r] = table[r * width + static_cast<std::size_t>(m - 1)];
  return col;
}

Estimate lyapunov_from_logs(std::span<const double> logs, int n) {
  if (std::any_of(logs.begin(), logs.end(), [](double l) { return l == kNegInf; })) {
    return {kNegInf, 0.0};
  }
  std::vector<double> rates(logs.size());
  std::transform(logs.begin(), logs.end(), rates.begin(), [n](double l) { return l / n; });
  const auto ms = mean_se(rates);
  return {ms.mean, ms.se};
}

namespace {

Estimate lambda_beta_unchecked(std::span<const double> logs, double beta, int n, double* dominance) {
  if (!(beta > 0.0)) throw ValidationError("beta_query must be positive");
  const auto est = moment_from_logs(logs, beta);
  *dominance = est.dominance;
  if (est.log_mean == kNegInf) return {kNegInf, 0.0};
  return {est.log_mean / n, est.rel_se / n};
}

bool dominated(double dominance, std::size_t reps) { return reps >= 2 && dominance > 0.99; }

}  // namespace

Estimate lambda_beta_from_logs(std::span<const double> logs, double beta, int n) {
  double dominance = 0.0;
  const auto est = lambda_beta_unchecked(logs, beta, n, &dominance);
  if (dominated(dominance, logs.size())) throw NumericalError("moment estimate unstable: increase reps");
  return est;
}

Estimate lyapunov_estimate(const ModelSpec& spec, int n, std::size_t reps, Seed seed, Exec exec) {
  if (n < 1) throw ValidationError("horizon must be at least 1");
  if (reps < 2) throw ValidationError("reps must be at least 2");
  const auto table = log_norm_table(spec, n, reps, seed, exec);
  return lyapunov_from_logs(table_column(table, n, n), n);
}

Estimate lambda_beta_estimate(const ModelSpec& spec, double beta, int n, std::size_t reps, Seed seed, Exec exec) {
  if (n < 1) throw ValidationError("horizon must be at least 1");
  if (reps < 2) throw ValidationError("reps must be at least 2");
  const auto table = log_norm_table(spec, n, reps, seed, exec);
  return lambda_beta_from_logs(table_column(table, n, n), beta, n);
}

ContractionScan find_contraction_m(const ModelSpec& spec, int m_max, std::size_t reps, Seed seed, Exec exec) {
  if (m_max < 1) throw ValidationError("m_max must be at least 1");
  if (reps < 2) throw ValidationError("reps must be at least 2");
  const auto table = log_norm_table(spec, m_max, reps, seed, exec);
  ContractionScan scan;
  for (int m = 1; m <= m_max; ++m) {
    const auto col = table_column(table, m_max, m);
    const auto ea = moment_from_logs(col, spec.alpha());
    const auto eb = moment_from_logs(col, spec.beta());
    // Past the witness the answer is settled; an unstable row only ends the scan.
    if (scan.witness && (dominated(ea.dominance, reps) || dominated(eb.dominance, reps))) break;
    check_dominance(ea, reps);
    check_dominance(eb, reps);
    MomentRow row{m, ea.mean, ea.se, eb.mean, eb.se};
    scan.rows.push_back(row);
    if (!scan.witness && below_one(row.moment_alpha, row.se_alpha) && below_one(row.moment_beta, row.se_beta)) {
      scan.witness = ContractionWitness{row};
    }
  }
  return scan;
}

LogMomentCheck check_log_moments(const ModelSpec& spec, std::size_t reps, Seed seed, Exec exec) {
  if (reps < 4) throw ValidationError("reps must be at least 4");
  std::vector<double> lm(reps);
  std::vector<double> lq(reps);
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    const int z = spec.chain().sample_stationary(rng);
    Vector q;
    Matrix m;
    sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, m);
    lm[r] = std::max(0.0, std::log(op_norm(m)));
    lq[r] = std::max(0.0, std::log(sup_norm(q)));
  });
  LogMomentCheck out;
  out.log_plus_matrix = mean_se(lm);
  out.log_plus_innovation = mean_se(lq);
  out.log_plus_innovation_half = mean_se(std::span<const double>(lq).first(reps / 2));
  const double combined = std::hypot(out.log_plus_innovation.se, out.log_plus_innovation_half.se);
  const double gap = std::abs(out.log_plus_innovation.mean - out.log_plus_innovation_half.mean);
  out.ok = std::isfinite(out.log_plus_matrix.mean) && std::isfinite(out.log_plus_innovation.mean) &&
           gap <= 3.0 * combined;
  return out;
}

AssumptionReport verify_assumptions(const ModelSpec& spec, const AssumptionOptions& opts, Seed seed, Exec exec) {
  AssumptionReport rep;
  const int n = opts.horizon;
  const auto table = log_norm_table(spec, n, opts.reps, derive(seed, "lyapunov"), exec);
  const auto final_col = table_column(table, n, n);
  rep.lyapunov = lyapunov_from_logs(final_col, n);
  rep.a2_satisfied = rep.lyapunov.value + 3.0 * rep.lyapunov.se < 0.0;

  for (int h : {std::max(1, n / 4), std::max(1, n / 2), n}) {
    if (!rep.lambda_beta_by_horizon.empty() && rep.lambda_beta_by_horizon.back().n == h) continue;
    double dominance = 0.0;
    const auto est = lambda_beta_unchecked(table_column(table, n, h), spec.beta(), h, &dominance);
    rep.lambda_beta_by_horizon.push_back({h, est, !dominated(dominance, opts.reps)});
  }
  rep.lambda_beta = rep.lambda_beta_by_horizon.back().lambda_beta;
  // Successive increments must not change sign beyond two combined se.
  int sign = 0;
  for (std::size_t i = 1; i < rep.lambda_beta_by_horizon.size(); ++i) {
    if (!rep.lambda_beta_by_horizon[i - 1].stable || !rep.lambda_beta_by_horizon[i].stable) continue;
    const auto& a = rep.lambda_beta_by_horizon[i - 1].lambda_beta;
    const auto& b = rep.lambda_beta_by_horizon[i].lambda_beta;
    const double diff = b.value - a.value;
    if (!std::isfinite(diff) || std::abs(diff) <= 2.0 * std::hypot(a.se, b.se)) continue;
    const int s = diff > 0 ? 1 : -1;
    if (sign != 0 && s != sign) rep.lambda_beta_monotone = false;
    sign = s;
  }

  const auto scan = find_contraction_m(spec, opts.m_max, opts.reps, derive(seed, "contraction"), exec);
  rep.moment_rows = scan.rows;
  rep.witness = scan.witness;
  if (scan.witness) rep.contraction_m = scan.witness->m();

  rep.log_moments = check_log_moments(spec, opts.reps, derive(seed, "log-moments"), exec);
  rep.log_moment_ok = rep.log_moments.ok;
  return rep;
}

}  // namespace heavytail
