#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heavytail/cone.hpp"
#include "heavytail/estimate.hpp"
#include "heavytail/model.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/products.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

inline constexpr const char* kBoundaryFlag = "boundary-grazing";
inline constexpr double kBoundaryFlagFraction = 1e-3;

/// Measure of regular variation with atomic angular part:
/// ν{x : ‖x‖ > t, x/‖x‖ ∈ B} = t^{-alpha} Σ_{w_j ∈ B} mass_j.
struct LimitMeasure {
  double alpha = 1.0;
  std::vector<WeightedDirection> atoms;  // weight = mass

  double total_mass() const;
};

/// Limit measure of a Pareto innovation: masses scale^alpha · p_j. A constant
/// innovation has the zero measure.
LimitMeasure limit_measure(const InnovationLaw& law, double alpha);

/// Throws ValidationError("not a continuity set") when an atom sits within
/// 1e-9 of the angular boundary.
double limit_measure_eval(const LimitMeasure& measure, const ConeSet& cone);

/// Per-atom closed form of μ∘Π^{-1}(cone) for one fixed matrix:
/// t^{-alpha} Σ_j mass_j ‖Π w_j‖^alpha 1{Π w_j / ‖Π w_j‖ ∈ B}.
/// `grazing` is set when some pushed direction lies on the angular boundary.
double pushforward_eval(const LimitMeasure& measure, const Matrix& pi, const ConeSet& cone, bool* grazing = nullptr);

/// Draws one random matrix Π.
using MatrixSampler = std::function<void(Rng&, Matrix&)>;

/// E(μ∘Π^{-1}(cone)) by Monte Carlo over Π; exact per-atom evaluation inside.
TailReport pushforward_expectation(const LimitMeasure& measure, const ConeSet& cone, const MatrixSampler& sampler,
                                   std::size_t reps, Seed seed, Exec exec = {});

/// E(μ∘Π^{-1}(cone)) with Π the product of k_back coefficient matrices along
/// a stationary regime path (k_back = 0 gives Π = I).
TailReport pushforward_measure(const LimitMeasure& measure, const ModelSpec& spec, int k_back, const ConeSet& cone,
                               std::size_t reps, Seed seed, Exec exec = {});

/// μ_X(cone) ≈ Σ_{j=0}^{K} E(μ_{Z_{-j}} ∘ (Π^{(j)})^{-1}(cone)). One backward
/// regime path per replica carries every term, so the se comes from the
/// per-replica totals. meta["remainder_bound"] bounds the dropped terms.
std::vector<TailReport> theoretical_tail_measure(const ModelSpec& spec, const std::vector<ConeSet>& cones, int depth,
                                                 std::size_t reps, Seed seed,
                                                 const std::optional<ContractionWitness>& witness, Exec exec = {});

TailReport theoretical_tail_measure(const ModelSpec& spec, const ConeSet& cone, int depth, std::size_t reps,
                                    Seed seed, const std::optional<ContractionWitness>& witness, Exec exec = {});

/// Both sides on the level-one scale: level^alpha times the measure of the
/// cone, so rows at different levels are directly comparable.
struct ConeComparison {
  std::string cone_id;
  double level = 0.0;
  double theo = 0.0;
  double theo_se = 0.0;
  double emp = 0.0;
  double emp_se = 0.0;
  double rel_err = 0.0;  // |emp - theo| / theo; 0 when both vanish, +inf when only theo does
  double remainder_bound = 0.0;
  std::size_t exceedances = 0;
  std::vector<std::string> flags;
};

double relative_error(double emp, double theo);

struct TheoremReport {
  std::vector<ConeComparison> rows;
  int depth = 0;
  std::size_t reps_theory = 0;
  std::size_t reps_empirical = 0;
  double alpha = 0.0;
  std::optional<TailReport> hill;  // Hill estimate on ‖X‖
};

/// Empirical cone measures of stationary draws against the theoretical limit
/// measure, per cone, plus a Hill estimate on ‖X‖ with k = floor(n^{2/3}).
TheoremReport verify_theorem(const ModelSpec& spec, const std::vector<ConeSet>& cones, int depth,
                             std::size_t reps_theory, std::size_t reps_empirical, Seed seed,
                             const std::optional<ContractionWitness>& witness, Exec exec = {});

/// Y + ΠQ with Q independent of (Y, Π).
struct Lemma1Setup {
  int d = 1;
  double alpha = 1.0;
  InnovationLaw y;
  InnovationLaw q;
  MatrixLaw pi;
};

/// Empirical cone measures of Y + ΠQ against ν(cone) + E(μ∘Π^{-1}(cone)).
TheoremReport verify_lemma1(const Lemma1Setup& setup, const std::vector<ConeSet>& cones, std::size_t reps,
                            Seed seed, Exec exec = {});

struct DirectionCheck {
  std::size_t trials = 0;
  std::size_t premise_true = 0;
  std::size_t violations = 0;
};

/// Counts (x, y, gamma) with ‖ȳ - (x+y)/‖x+y‖‖ > gamma yet ‖x‖ <= gamma‖y‖/(2+gamma).
bool direction_inequality_violated(const Vector& x, const Vector& y, double gamma, bool* premise = nullptr);

/// Randomized triples over scales 1e-3..1e3, heavy- and light-tailed generators.
DirectionCheck check_direction_inequality(std::size_t trials, Seed seed);

/// d = 2, coordinates in {-2,...,2}, gamma in {0.1, 0.2, ..., 3.0}.
DirectionCheck check_direction_inequality_grid();

struct RadonBound {
  double bound = 0.0;
  TailReport measure;  // theoretical μ_X(cone) on the same replicas
  bool holds = false;  // measure <= bound up to a 1e-12 relative rounding allowance
};

/// Σ_{j=0}^{K} (Σ_i mass_i) ε^{-alpha} Ê‖Π^{(j)}‖^alpha plus a geometric tail,
/// with ε the cone level; checked against theoretical_tail_measure.
RadonBound radon_mass_bound(const ModelSpec& spec, const ConeSet& cone, int depth, std::size_t reps, Seed seed,
                            const std::optional<ContractionWitness>& witness, Exec exec = {});

struct RemainderRow {
  int lag = 0;  // L
  double level = 0.0;
  double delta = 0.0;
  double value = 0.0;
  double se = 0.0;
  std::size_t exceedances = 0;
  std::size_t n = 0;
};

/// level^alpha · P(Σ_{j=L+1}^{depth} ‖Π^{(j)}‖ ‖Q_{-j}‖ > delta · level) on
/// common random numbers for every (L, level).
std::vector<RemainderRow> remainder_diagnostic(const ModelSpec& spec, const std::vector<int>& lags, double delta,
                                               const std::vector<double>& levels, int depth, std::size_t reps,
                                               Seed seed, const std::optional<ContractionWitness>& witness,
                                               Exec exec = {});

}  // namespace heavytail
