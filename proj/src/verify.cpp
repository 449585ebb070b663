#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "heavytail/errors.hpp"
#include "heavytail/simulate.hpp"
#include "heavytail/verify.hpp"

namespace heavytail {

namespace {

void require_witness(const std::optional<ContractionWitness>& witness) {
  if (!witness) throw PreconditionError("run find_contraction_m first");
}

void require_regularly_varying(const ModelSpec& spec) {
  if (!spec.regularly_varying()) throw ValidationError("innovation law not regularly varying");
}

std::vector<LimitMeasure> regime_measures(const ModelSpec& spec) {
  std::vector<LimitMeasure> out;
  for (const auto& r : spec.regimes()) out.push_back(limit_measure(r.innovation, spec.alpha()));
  return out;
}

void flag_grazing(TailReport& report, std::size_t grazing, std::size_t reps) {
  report.meta["boundary_replicas"] = static_cast<double>(grazing);
  if (static_cast<double>(grazing) > kBoundaryFlagFraction * static_cast<double>(reps)) {
    report.flags.emplace_back(kBoundaryFlag);
  }
}

// Sums every term of the tail-measure series along one backward regime path per
// replica. Term 0 (Π = I) is exact and handled by the caller.
struct SeriesTotals {
  std::vector<std::vector<double>> per_cone;  // [cone][replica], terms j = 1..depth
  std::vector<std::size_t> grazing;           // [cone] replicas touching a boundary
  std::vector<double> norm_power_sum;         // [replica] Σ_{j=1}^{depth} ‖Π^{(j)}‖^alpha
  std::vector<double> tail_power_sum;         // [replica] Σ_{j=depth+1}^{depth+m} ‖Π^{(j)}‖^alpha
};

SeriesTotals series_totals(const ModelSpec& spec, const std::vector<ConeSet>& cones, int depth, std::size_t reps,
                           Seed seed, int tail_factors, Exec exec) {
  const auto measures = regime_measures(spec);
  const int d = spec.d();
  const double alpha = spec.alpha();
  SeriesTotals out;
  out.per_cone.assign(cones.size(), std::vector<double>(reps, 0.0));
  out.norm_power_sum.assign(reps, 0.0);
  out.tail_power_sum.assign(reps, 0.0);
  std::vector<std::vector<char>> grazed(cones.size(), std::vector<char>(reps, 0));

  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    Matrix prod = Matrix::Identity(d, d);
    Matrix scratch(d, d);
    Vector q;
    Matrix m;
    int z = spec.chain().sample_stationary(rng);
    for (int j = 0; j <= depth; ++j) {
      if (j > 0) {
        z = spec.chain().step_backward(z, rng);
        const double norm = op_norm(prod);
        if (norm == 0.0) break;  // every later term vanishes as well
        out.norm_power_sum[r] += std::pow(norm, alpha);
        for (std::size_t c = 0; c < cones.size(); ++c) {
          bool graze = false;
          out.per_cone[c][r] += pushforward_eval(measures[static_cast<std::size_t>(z)], prod, cones[c], &graze);
          if (graze) grazed[c][r] = 1;
        }
      }
      sample_regime_pair(spec.regime(z), alpha, rng, q, m);
      scratch.noalias() = prod * m;
      prod.swap(scratch);
    }
    for (int k = 0; k < tail_factors; ++k) {
      const double norm = op_norm(prod);
      if (norm == 0.0) break;
      out.tail_power_sum[r] += std::pow(norm, alpha);
      if (k + 1 == tail_factors) break;
      z = spec.chain().step_backward(z, rng);
      sample_regime_pair(spec.regime(z), alpha, rng, q, m);
      scratch.noalias() = prod * m;
      prod.swap(scratch);
    }
  });

  for (const auto& g : grazed) out.grazing.push_back(static_cast<std::size_t>(std::count(g.begin(), g.end(), 1)));
  return out;
}

double geometric_tail_factor(const ContractionWitness& w) { return 1.0 / (1.0 - w.row.moment_alpha); }

}  // namespace

double LimitMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  return total;
}

LimitMeasure limit_measure(const InnovationLaw& law, double alpha) {
  LimitMeasure mu;
  mu.alpha = alpha;
  if (const auto* p = std::get_if<ParetoInnovation>(&law)) {
    const double mass = std::pow(p->scale, alpha);
    for (const auto& a : p->atoms.atoms) mu.atoms.push_back({a.direction, mass * a.weight});
  }
  return mu;
}

double limit_measure_eval(const LimitMeasure& measure, const ConeSet& cone) {
  double mass = 0.0;
  for (const auto& a : measure.atoms) {
    if (cone.angular.on_boundary(a.direction)) throw ValidationError("not a continuity set");
    if (cone.angular.contains(a.direction)) mass += a.weight;
  }
  return mass * std::pow(cone.level, -measure.alpha);
}

double pushforward_eval(const LimitMeasure& measure, const Matrix& pi, const ConeSet& cone, bool* grazing) {
  double sum = 0.0;
  for (const auto& a : measure.atoms) {
    const Vector pushed = pi * a.direction;
    const double norm = sup_norm(pushed);
    if (norm == 0.0) continue;
    const Vector dir = pushed / norm;
    if (grazing != nullptr && cone.angular.on_boundary(dir)) *grazing = true;
    if (cone.angular.contains(dir)) sum += a.weight * std::pow(norm, measure.alpha);
  }
  return sum * std::pow(cone.level, -measure.alpha);
}

TailReport pushforward_expectation(const LimitMeasure& measure, const ConeSet& cone, const MatrixSampler& sampler,
                                   std::size_t reps, Seed seed, Exec exec) {
  if (reps < 1) throw ValidationError("reps must be at least 1");
  std::vector<double> value(reps);
  std::vector<char> grazed(reps, 0);
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    Matrix pi;
    sampler(rng, pi);
    bool graze = false;
    value[r] = pushforward_eval(measure, pi, cone, &graze);
    grazed[r] = graze ? 1 : 0;
  });
  const auto ms = mean_se(value);
  TailReport out;
  out.value = ms.mean;
  out.se = ms.se;
  out.n = reps;
  out.meta["t"] = cone.level;
  flag_grazing(out, static_cast<std::size_t>(std::count(grazed.begin(), grazed.end(), 1)), reps);
  return out;
}

TailReport pushforward_measure(const LimitMeasure& measure, const ModelSpec& spec, int k_back, const ConeSet& cone,
                               std::size_t reps, Seed seed, Exec exec) {
  if (k_back < 0) throw ValidationError("k_back must be non-negative");
  if (k_back == 0) {
    TailReport out;
    out.value = limit_measure_eval(measure, cone);
    out.n = reps;
    out.meta["t"] = cone.level;
    return out;
  }
  const MatrixSampler sampler = [&spec, k_back](Rng& rng, Matrix& pi) {
    const auto sample = product_sample(spec, k_back, rng);
    pi = std::exp(sample.log_scale) * sample.matrix;
  };
  auto out = pushforward_expectation(measure, cone, sampler, reps, seed, exec);
  out.meta["k_back"] = k_back;
  return out;
}

std::vector<TailReport> theoretical_tail_measure(const ModelSpec& spec, const std::vector<ConeSet>& cones, int depth,
                                                 std::size_t reps, Seed seed,
                                                 const std::optional<ContractionWitness>& witness, Exec exec) {
  require_witness(witness);
  require_regularly_varying(spec);
  if (depth < 0) throw ValidationError("depth must be non-negative");
  if (reps < 1) throw ValidationError("reps must be at least 1");
  for (const auto& c : cones) validate_cone(c, spec.d());

  const auto measures = regime_measures(spec);
  const Vector& pi = spec.chain().pi();
  double max_mass = 0.0;
  for (const auto& mu : measures) max_mass = std::max(max_mass, mu.total_mass());

  const auto totals = series_totals(spec, cones, depth, reps, seed, witness->m(), exec);
  const double tail_mean = mean_se(totals.tail_power_sum).mean;

  std::vector<TailReport> out;
  for (std::size_t c = 0; c < cones.size(); ++c) {
    double head = 0.0;
    for (std::size_t i = 0; i < measures.size(); ++i) {
      head += pi(static_cast<Eigen::Index>(i)) * limit_measure_eval(measures[i], cones[c]);
    }
    const auto ms = mean_se(totals.per_cone[c]);
    TailReport r;
    r.value = head + ms.mean;
    r.se = ms.se;
    r.n = reps;
    r.meta["t"] = cones[c].level;
    r.meta["depth"] = depth;
    r.meta["remainder_bound"] =
        cones[c].angular.is_empty()
            ? 0.0
            : std::pow(cones[c].level, -spec.alpha()) * max_mass * tail_mean * geometric_tail_factor(*witness);
    flag_grazing(r, totals.grazing[c], reps);
    out.push_back(std::move(r));
  }
  return out;
}

TailReport theoretical_tail_measure(const ModelSpec& spec, const ConeSet& cone, int depth, std::size_t reps,
                                    Seed seed, const std::optional<ContractionWitness>& witness, Exec exec) {
  return theoretical_tail_measure(spec, std::vector<ConeSet>{cone}, depth, reps, seed, witness, exec).front();
}

double relative_error(double emp, double theo) {
  if (theo > 0.0) return std::abs(emp - theo) / theo;
  return emp == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

TheoremReport compare(const std::vector<ConeSet>& cones, const std::vector<TailReport>& theory,
                      const std::vector<TailReport>& empirical, double alpha) {
  TheoremReport rep;
  for (std::size_t c = 0; c < cones.size(); ++c) {
    ConeComparison row;
    row.cone_id = cones[c].id;
    row.level = cones[c].level;
    // level^alpha · μ(A) is the measure of the level-one cone, the quantity
    // the empirical side estimates.
    const double scale = std::pow(cones[c].level, alpha);
    row.theo = scale * theory[c].value;
    row.theo_se = scale * theory[c].se;
    row.emp = empirical[c].value;
    row.emp_se = empirical[c].se;
    row.rel_err = relative_error(row.emp, row.theo);
    if (auto it = theory[c].meta.find("remainder_bound"); it != theory[c].meta.end()) row.remainder_bound = scale * it->second;
    if (auto it = empirical[c].meta.find("exceedances"); it != empirical[c].meta.end()) {
      row.exceedances = static_cast<std::size_t>(it->second);
    }
    row.flags = theory[c].flags;
    row.flags.insert(row.flags.end(), empirical[c].flags.begin(), empirical[c].flags.end());
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace

TheoremReport verify_theorem(const ModelSpec& spec, const std::vector<ConeSet>& cones, int depth,
                             std::size_t reps_theory, std::size_t reps_empirical, Seed seed,
                             const std::optional<ContractionWitness>& witness, Exec exec) {
  const auto theory = theoretical_tail_measure(spec, cones, depth, reps_theory, derive(seed, "theory"), witness, exec);
  const auto draws = sample_stationary(spec, depth, reps_empirical, derive(seed, "empirical"), exec);
  const auto xs = values(draws);
  std::vector<TailReport> empirical;
  for (const auto& c : cones) empirical.push_back(empirical_cone_measure(xs, c, spec.alpha()));

  auto rep = compare(cones, theory, empirical, spec.alpha());
  rep.depth = depth;
  rep.reps_theory = reps_theory;
  rep.reps_empirical = reps_empirical;
  rep.alpha = spec.alpha();
  const auto ns = norms(draws);
  if (ns.size() >= 3) rep.hill = hill_estimator(ns, default_k(ns.size()));
  return rep;
}

TheoremReport verify_lemma1(const Lemma1Setup& setup, const std::vector<ConeSet>& cones, std::size_t reps, Seed seed,
                            Exec exec) {
  validate_innovation(setup.y, setup.d);
  validate_innovation(setup.q, setup.d);
  validate_matrix_law(setup.pi, setup.d);
  if (!std::holds_alternative<ParetoInnovation>(setup.q)) throw ValidationError("innovation law not regularly varying");
  for (const auto& c : cones) validate_cone(c, setup.d);

  const Seed emp_seed = derive(seed, "empirical");
  std::vector<Vector> xs(reps);
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(emp_seed, r);
    Vector y;
    Vector q;
    Matrix pi;
    sample_innovation(setup.y, setup.alpha, rng, y);
    sample_matrix(setup.pi, rng, pi);
    sample_innovation(setup.q, setup.alpha, rng, q);
    xs[r] = y + pi * q;
  });

  const auto nu = limit_measure(setup.y, setup.alpha);
  const auto mu = limit_measure(setup.q, setup.alpha);
  const MatrixSampler sampler = [&setup](Rng& rng, Matrix& pi) { sample_matrix(setup.pi, rng, pi); };
  std::vector<TailReport> theory;
  std::vector<TailReport> empirical;
  for (std::size_t c = 0; c < cones.size(); ++c) {
    auto t = pushforward_expectation(mu, cones[c], sampler, reps, derive(seed, "theory-" + std::to_string(c)), exec);
    t.value += limit_measure_eval(nu, cones[c]);
    theory.push_back(std::move(t));
    empirical.push_back(empirical_cone_measure(xs, cones[c], setup.alpha));
  }
  auto rep = compare(cones, theory, empirical, setup.alpha);
  rep.reps_theory = reps;
  rep.reps_empirical = reps;
  rep.alpha = setup.alpha;
  return rep;
}

bool direction_inequality_violated(const Vector& x, const Vector& y, double gamma, bool* premise) {
  const Vector sum = x + y;
  const double gap = sup_norm(direction(y) - direction(sum));
  const bool holds = gap > gamma;
  if (premise != nullptr) *premise = holds;
  return holds && !(sup_norm(x) > gamma * sup_norm(y) / (2.0 + gamma));
}

DirectionCheck check_direction_inequality(std::size_t trials, Seed seed) {
  DirectionCheck out;
  Rng rng = replica_stream(seed, 0);
  std::normal_distribution<double> gauss;
  auto draw = [&](int d) {
    Vector v(d);
    const bool heavy = uniform01(rng) < 0.5;
    const double index = heavy ? (uniform01(rng) < 0.5 ? 0.5 : 1.5) : 0.0;
    for (int i = 0; i < d; ++i) {
      if (heavy) {
        const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
        v(i) = sign * std::pow(uniform_open0(rng), -1.0 / index);
      } else {
        v(i) = gauss(rng);
      }
    }
    return v * std::pow(10.0, -3.0 + 6.0 * uniform01(rng));
  };
  while (out.trials < trials) {
    const int d = 1 + static_cast<int>(uniform01(rng) * 3.0);
    const Vector y = draw(d);
    Vector x = draw(d);
    // Near-cancelling pairs exercise large direction gaps.
    if (uniform01(rng) < 0.1) x = -y * (0.5 + uniform01(rng)) + x * 1e-3;
    const double gamma = std::pow(10.0, -3.0 + 4.0 * uniform01(rng));
    if (sup_norm(y) == 0.0 || sup_norm(x + y) == 0.0) continue;
    bool premise = false;
    if (direction_inequality_violated(x, y, gamma, &premise)) ++out.violations;
    if (premise) ++out.premise_true;
    ++out.trials;
  }
  return out;
}

DirectionCheck check_direction_inequality_grid() {
  DirectionCheck out;
  for (int x1 = -2; x1 <= 2; ++x1) {
    for (int x2 = -2; x2 <= 2; ++x2) {
      for (int y1 = -2; y1 <= 2; ++y1) {
        for (int y2 = -2; y2 <= 2; ++y2) {
          const Vector x = Eigen::Vector2d(x1, x2);
          const Vector y = Eigen::Vector2d(y1, y2);
          if (sup_norm(y) == 0.0 || sup_norm(x + y) == 0.0) continue;
          for (int g = 1; g <= 30; ++g) {
            bool premise = false;
            if (direction_inequality_violated(x, y, 0.1 * g, &premise)) ++out.violations;
            if (premise) ++out.premise_true;
            ++out.trials;
          }
        }
      }
    }
  }
  return out;
}

RadonBound radon_mass_bound(const ModelSpec& spec, const ConeSet& cone, int depth, std::size_t reps, Seed seed,
                            const std::optional<ContractionWitness>& witness, Exec exec) {
  require_witness(witness);
  RadonBound out;
  out.measure = theoretical_tail_measure(spec, cone, depth, reps, seed, witness, exec);
  // Same seed, hence the same regime paths and products as the measure above.
  const auto totals = series_totals(spec, {}, depth, reps, seed, witness->m(), exec);
  double mass = 0.0;
  for (const auto& mu : regime_measures(spec)) mass += mu.total_mass();
  const double head = 1.0 + mean_se(totals.norm_power_sum).mean;
  const double tail = mean_se(totals.tail_power_sum).mean * geometric_tail_factor(*witness);
  out.bound = mass * std::pow(cone.level, -spec.alpha()) * (head + tail);
  // Equality cases (positive scalar series) land on either side by rounding.
  out.holds = out.measure.value <= out.bound * (1.0 + 1e-12);
  return out;
}

std::vector<RemainderRow> remainder_diagnostic(const ModelSpec& spec, const std::vector<int>& lags, double delta,
                                               const std::vector<double>& levels, int depth, std::size_t reps,
                                               Seed seed, const std::optional<ContractionWitness>& witness,
                                               Exec exec) {
  require_witness(witness);
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  if (depth < 0) throw ValidationError("depth must be non-negative");
  for (double t : levels) {
    if (!(t > 0.0)) throw ValidationError("level must be positive");
  }
  for (int lag : lags) {
    if (lag < 0) throw ValidationError("lag must be non-negative");
  }
  const int d = spec.d();
  const std::size_t nl = lags.size();
  std::vector<double> tails(reps * nl, 0.0);
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    std::vector<double> terms(static_cast<std::size_t>(depth) + 1, 0.0);
    Matrix prod = Matrix::Identity(d, d);
    Matrix scratch(d, d);
    Vector q;
    Matrix m;
    int z = spec.chain().sample_stationary(rng);
    for (int j = 0; j <= depth; ++j) {
      if (j > 0) z = spec.chain().step_backward(z, rng);
      sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, m);
      terms[static_cast<std::size_t>(j)] = op_norm(prod) * sup_norm(q);
      scratch.noalias() = prod * m;
      prod.swap(scratch);
    }
    // suffix[j] = Σ_{i>=j} terms[i], summed from the deep end.
    std::vector<double> suffix(terms.size() + 1, 0.0);
    for (std::size_t j = terms.size(); j-- > 0;) suffix[j] = suffix[j + 1] + terms[j];
    for (std::size_t l = 0; l < nl; ++l) {
      const auto first = static_cast<std::size_t>(lags[l]) + 1;
      tails[r * nl + l] = first < suffix.size() ? suffix[first] : 0.0;
    }
  });

  std::vector<RemainderRow> rows;
  for (std::size_t l = 0; l < nl; ++l) {
    for (double t : levels) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < reps; ++r) hits += tails[r * nl + l] > delta * t ? 1 : 0;
      const double p = static_cast<double>(hits) / static_cast<double>(reps);
      const double scale = std::pow(t, spec.alpha());
      rows.push_back({lags[l], t, delta, scale * p, scale * std::sqrt(p * (1.0 - p) / static_cast<double>(reps)),
                      hits, reps});
    }
  }
  return rows;
}

}  // namespace heavytail
