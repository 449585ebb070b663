#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"
#include "heavytail/simulate.hpp"

namespace heavytail {

PathSample simulate_path(const ModelSpec& spec, const Vector& x0, int n_steps, int burn_in, Rng& rng,
                         bool record_draws) {
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
  if (burn_in < 0 || burn_in >= n_steps) throw ValidationError("burn_in must lie in [0, n_steps)");
  if (x0.size() != spec.d()) throw ValidationError("x0 dimension mismatch");

  PathSample path;
  path.burn_in = burn_in;
  path.states.reserve(static_cast<std::size_t>(n_steps));
  path.xs.reserve(static_cast<std::size_t>(n_steps - burn_in));
  Vector x = x0;
  Vector next(spec.d());
  Vector q;
  Matrix m;
  int z = spec.chain().sample_stationary(rng);
  for (int n = 0; n < n_steps; ++n) {
    if (n > 0) z = spec.chain().step_forward(z, rng);
    path.states.push_back(z);
    sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, m);
    next.noalias() = m * x;
    next += q;
    x.swap(next);
    if (record_draws) path.draws.push_back({q, m});
    if (n >= burn_in) path.xs.push_back(x);
  }
  return path;
}

bool path_satisfies_recursion(const PathSample& path, const Vector& x0) {
  if (path.draws.size() != path.states.size()) return false;
  Vector x = x0;
  for (std::size_t n = 0; n < path.draws.size(); ++n) {
    Vector next = path.draws[n].m * x;
    next += path.draws[n].q;
    x = next;
    if (n >= static_cast<std::size_t>(path.burn_in)) {
      if (x != path.xs[n - static_cast<std::size_t>(path.burn_in)]) return false;
    }
  }
  return true;
}

std::vector<StationaryDraw> sample_stationary(const ModelSpec& spec, int depth, std::size_t reps, Seed seed,
                                              Exec exec) {
  if (depth < 0) throw ValidationError("depth must be non-negative");
  std::vector<StationaryDraw> draws(reps);
  const int d = spec.d();
  for_each_replica(reps, exec, [&](std::size_t r) {
    Rng rng = replica_stream(seed, r);
    Matrix prod = Matrix::Identity(d, d);
    Matrix scratch(d, d);
    Vector x = Vector::Zero(d);
    Vector q;
    Matrix m;
    int z = spec.chain().sample_stationary(rng);
    const int z0 = z;
    for (int j = 0; j <= depth; ++j) {
      if (j > 0) z = spec.chain().step_backward(z, rng);
      sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, m);
      x.noalias() += prod * q;
      scratch.noalias() = prod * m;
      prod.swap(scratch);
    }
    draws[r] = StationaryDraw{std::move(x), depth, op_norm(prod), z0};
  });
  return draws;
}

TruncationDepth truncation_depth(const ModelSpec& spec, Tolerance tol,
                                 const std::optional<ContractionWitness>& witness, std::size_t reps, Seed seed,
                                 Exec exec, int cap) {
  if (!witness) throw PreconditionError("run find_contraction_m first");
  if (!(tol.value > 0.0)) throw ValidationError("tolerance must be positive");
  if (reps < 2) throw ValidationError("reps must be at least 2");

  TruncationDepth out;
  out.exponent = std::min(spec.alpha(), 1.0);
  if (tol.value >= 1.0) return out;  // Π^{(0)} = I has moment exactly 1

  const int m = witness->m();
  const int d = spec.d();
  struct Walker {
    Rng rng;
    ProductAccumulator acc;
    int z;
  };
  std::vector<Walker> walkers;
  walkers.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = replica_stream(seed, r);
    const int z = spec.chain().sample_stationary(rng);
    walkers.push_back({std::move(rng), ProductAccumulator(d), z});
  }
  std::vector<double> logs(reps);
  bool first = true;
  auto extend = [&](int factors) {
    for_each_replica(reps, exec, [&, factors](std::size_t r) {
      auto& w = walkers[r];
      Vector q;
      Matrix f;
      for (int k = 0; k < factors; ++k) {
        if (!(first && k == 0)) w.z = spec.chain().step_backward(w.z, w.rng);
        sample_regime_pair(spec.regime(w.z), spec.alpha(), w.rng, q, f);
        w.acc.multiply_right(f);
      }
      logs[r] = w.acc.log_norm();
    });
    first = false;
  };
  auto all_vanished = [&] {
    return std::all_of(logs.begin(), logs.end(),
                       [](double l) { return l == -std::numeric_limits<double>::infinity(); });
  };

  // Series already stops after Q_0.
  extend(1);
  if (all_vanished()) return out;
  int depth = 1;
  if (m > 1) {
    extend(m - 1);
    depth = m;
  }
  const auto rho = moment_from_logs(logs, out.exponent);
  out.geometric_factor = rho.mean < 1.0 ? 1.0 / (1.0 - rho.mean) : std::numeric_limits<double>::infinity();

  while (true) {
    const auto est = moment_from_logs(logs, out.exponent);
    if (est.mean <= tol.value || all_vanished()) {
      out.depth = depth;
      out.moment = est.mean;
      out.moment_se = est.se;
      return out;
    }
    if (depth + m > cap) throw NumericalError("tolerance unreachable");
    extend(m);
    depth += m;
  }
}

std::vector<StationaryDraw> sample_stationary(const ModelSpec& spec, Tolerance tol,
                                              const std::optional<ContractionWitness>& witness,
                                              std::size_t reps, Seed seed, Exec exec, std::size_t depth_reps) {
  const auto depth = truncation_depth(spec, tol, witness, depth_reps, derive(seed, "depth"), exec);
  return sample_stationary(spec, depth.depth, reps, seed, exec);
}

StationaryDraw advance_one_step(const ModelSpec& spec, const StationaryDraw& draw, Rng& rng) {
  const int z = spec.chain().step_forward(draw.regime, rng);
  Vector q;
  Matrix m;
  sample_regime_pair(spec.regime(z), spec.alpha(), rng, q, m);
  StationaryDraw out;
  out.x = q + m * draw.x;
  out.depth = draw.depth + 1;
  out.tail_bound = op_norm(m) * draw.tail_bound;
  out.regime = z;
  return out;
}

std::vector<double> norms(const std::vector<StationaryDraw>& draws) {
  std::vector<double> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](const StationaryDraw& d) { return sup_norm(d.x); });
  return out;
}

std::vector<Vector> values(const std::vector<StationaryDraw>& draws) {
  std::vector<Vector> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](const StationaryDraw& d) { return d.x; });
  return out;
}

}  // namespace heavytail
