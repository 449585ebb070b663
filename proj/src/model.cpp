#include <cmath>
#include <string>

#include "heavytail/errors.hpp"
#include "heavytail/model.hpp"

namespace heavytail {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_shape(const Matrix& m, int d, const char* what) {
  if (m.rows() != d || m.cols() != d) {
    throw ValidationError(std::string(what) + " must be " + std::to_string(d) + "x" +
                          std::to_string(d));
  }
  if (!m.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
}

}  // namespace

double AtomicSpectralMeasure::total_weight() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  return total;
}

void validate_innovation(const InnovationLaw& law, int d) {
  std::visit(overloaded{
                 [d](const ParetoInnovation& p) {
                   if (p.atoms.atoms.empty()) throw ValidationError("innovation needs at least one atom");
                   for (const auto& a : p.atoms.atoms) {
                     if (a.direction.size() != d) throw ValidationError("atom dimension mismatch");
                     if (std::abs(sup_norm(a.direction) - 1.0) > kUnitSphereTolerance) {
                       throw ValidationError("atom not on unit sphere");
                     }
                     if (!(a.weight > 0.0)) throw ValidationError("atom weights must be positive");
                   }
                   if (std::abs(p.atoms.total_weight() - 1.0) > 1e-9) {
                     throw ValidationError("atom weights must sum to 1");
                   }
                   if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
                     throw ValidationError("innovation scale must be positive");
                   }
                   if (!(p.perturbation >= 0.0) || !std::isfinite(p.perturbation)) {
                     throw ValidationError("perturbation must be non-negative");
                   }
                 },
                 [d](const ConstantInnovation& c) {
                   if (c.value.size() != d) throw ValidationError("constant innovation dimension mismatch");
                   if (!c.value.allFinite()) throw ValidationError("constant innovation is not finite");
                 },
             },
             law);
}

void validate_matrix_law(const MatrixLaw& law, int d) {
  std::visit(overloaded{
                 [d](const DeterministicMatrix& m) { require_shape(m.value, d, "deterministic matrix"); },
                 [d](const ScalarRandomMatrix& m) {
                   require_shape(m.base, d, "scalar-random base");
                   if (!(m.low > 0.0) || !(m.low <= m.high) || !std::isfinite(m.high)) {
                     throw ValidationError("scalar-random range must satisfy 0 < low <= high");
                   }
                 },
                 [d](const RandomEntriesMatrix& m) {
                   require_shape(m.low, d, "random-entries low");
                   require_shape(m.high, d, "random-entries high");
                   if ((m.low.array() > m.high.array()).any()) {
                     throw ValidationError("random-entries range must satisfy low <= high");
                   }
                 },
             },
             law);
}

double op_norm_bound(const MatrixLaw& law) {
  return std::visit(overloaded{
                        [](const DeterministicMatrix& m) { return op_norm(m.value); },
                        [](const ScalarRandomMatrix& m) { return m.high * op_norm(m.base); },
                        [](const RandomEntriesMatrix& m) {
                          return op_norm(m.low.cwiseAbs().cwiseMax(m.high.cwiseAbs()));
                        },
                    },
                    law);
}

ModelSpec::ModelSpec(int d, double alpha, double beta, std::vector<RegimeLaw> regimes, const Matrix& h)
    : d_(d), alpha_(alpha), beta_(beta), regimes_(std::move(regimes)), chain_(TransitionMatrix::from_matrix(h)) {
  if (d_ < 1) throw ValidationError("dimension must be at least 1");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ValidationError("alpha must be positive");
  if (!(beta_ > alpha_) || !std::isfinite(beta_)) throw ValidationError("beta must exceed alpha");
  if (regimes_.empty()) throw ValidationError("at least one regime required");
  if (regimes_.size() != chain_.size()) {
    throw ValidationError("transition matrix size does not match regime count");
  }
  for (const auto& r : regimes_) {
    validate_innovation(r.innovation, d_);
    validate_matrix_law(r.matrix, d_);
    if (r.coupled && (!std::holds_alternative<ScalarRandomMatrix>(r.matrix) ||
                      !std::holds_alternative<ParetoInnovation>(r.innovation))) {
      throw ValidationError("coupled regime requires a Pareto innovation and a scalar-random matrix");
    }
  }
}

bool ModelSpec::regularly_varying() const {
  for (const auto& r : regimes_) {
    if (!std::holds_alternative<ParetoInnovation>(r.innovation)) return false;
  }
  return true;
}

void sample_innovation(const InnovationLaw& law, double alpha, Rng& rng, Vector& q, double* radial_uniform) {
  if (const auto* c = std::get_if<ConstantInnovation>(&law)) {
    q = c->value;
    return;
  }
  const auto& p = std::get<ParetoInnovation>(law);
  const double v = uniform_open0(rng);
  if (radial_uniform != nullptr) *radial_uniform = v;
  const double radius = p.scale * std::pow(v, -1.0 / alpha);

  const auto& atoms = p.atoms.atoms;
  std::size_t pick = 0;
  if (atoms.size() > 1) {
    const double u = uniform01(rng) * p.atoms.total_weight();
    double acc = 0.0;
    pick = atoms.size() - 1;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      acc += atoms[j].weight;
      if (u < acc) {
        pick = j;
        break;
      }
    }
  }
  q = radius * atoms[pick].direction;
  if (p.perturbation > 0.0) {
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) += p.perturbation * (2.0 * uniform01(rng) - 1.0);
  }
}

void sample_matrix(const MatrixLaw& law, Rng& rng, Matrix& m, std::optional<double> shared_uniform) {
  std::visit(overloaded{
                 [&m](const DeterministicMatrix& law) { m = law.value; },
                 [&](const ScalarRandomMatrix& law) {
                   const double u = shared_uniform ? *shared_uniform : uniform01(rng);
                   m = (law.low + (law.high - law.low) * u) * law.base;
                 },
                 [&](const RandomEntriesMatrix& law) {
                   m.resize(law.low.rows(), law.low.cols());
                   for (Eigen::Index r = 0; r < m.rows(); ++r) {
                     for (Eigen::Index c = 0; c < m.cols(); ++c) {
                       m(r, c) = law.low(r, c) + (law.high(r, c) - law.low(r, c)) * uniform01(rng);
                     }
                   }
                 },
             },
             law);
}

void sample_regime_pair(const RegimeLaw& regime, double alpha, Rng& rng, Vector& q, Matrix& m) {
  double radial = 0.0;
  sample_innovation(regime.innovation, alpha, rng, q, &radial);
  sample_matrix(regime.matrix, rng, m, regime.coupled ? std::optional<double>(radial) : std::nullopt);
}

CoefficientPair sample_regime_pair(const ModelSpec& spec, int regime, Rng& rng) {
  CoefficientPair pair;
  sample_regime_pair(spec.regime(regime), spec.alpha(), rng, pair.q, pair.m);
  return pair;
}

}  // namespace heavytail
