#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "heavytail/model.hpp"
#include "heavytail/parallel.hpp"
#include "heavytail/products.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

/// One run of X_n = Q_n + M_n X_{n-1} from a given X_0.
struct PathSample {
  std::vector<int> states;               // Z_1..Z_{n_steps}, burn-in included
  std::vector<Vector> xs;                // X_{burn_in+1}..X_{n_steps}
  int burn_in = 0;
  std::vector<CoefficientPair> draws;    // (Q_n, M_n) for every step when recorded
};

inline constexpr int kDefaultBurnIn = 1000;

PathSample simulate_path(const ModelSpec& spec, const Vector& x0, int n_steps, int burn_in, Rng& rng,
                         bool record_draws = false);

/// Replays the recorded draws from x0 and checks every step exactly.
bool path_satisfies_recursion(const PathSample& path, const Vector& x0);

/// Truncated series value X = Σ_{j=0}^{depth} Π^{(j)} Q_{-j}.
struct StationaryDraw {
  Vector x;
  int depth = 0;
  double tail_bound = 0.0;  // op_norm of Π^{(depth+1)}, the factor in front of the dropped tail
  int regime = 0;           // Z_0
};

struct Tolerance {
  double value = 0.0;
};

inline constexpr int kDepthCap = 10000;

/// Depth from the remainder-moment surrogate: the smallest multiple K of the
/// verified contraction lag with Ê‖Π^{(K)}‖^p <= tol, p = min(alpha, 1). K = 0
/// when tol >= 1, or when Π^{(1)} vanished on every replica (the series stops
/// after Q_0).
struct TruncationDepth {
  int depth = 0;
  double exponent = 1.0;
  double moment = 1.0;        // Ê‖Π^{(K)}‖^p
  double moment_se = 0.0;
  /// 1 / (1 - Ê‖Π^{(m)}‖^p): geometric factor bounding Σ_{j>=K} E‖Π^{(j)}‖^p by
  /// moment·m·factor under block submultiplicativity. A surrogate, not a
  /// distributional bound.
  double geometric_factor = 1.0;
};

TruncationDepth truncation_depth(const ModelSpec& spec, Tolerance tol,
                                 const std::optional<ContractionWitness>& witness, std::size_t reps, Seed seed,
                                 Exec exec = {}, int cap = kDepthCap);

/// Stationary draws by the truncated backward series. Regimes run backward
/// from Z_0 ~ pi through the reversed kernel.
std::vector<StationaryDraw> sample_stationary(const ModelSpec& spec, int depth, std::size_t reps, Seed seed,
                                              Exec exec = {});

/// Same with depth = truncation_depth(spec, tol) computed on derive(seed, "depth").
std::vector<StationaryDraw> sample_stationary(const ModelSpec& spec, Tolerance tol,
                                              const std::optional<ContractionWitness>& witness,
                                              std::size_t reps, Seed seed, Exec exec = {},
                                              std::size_t depth_reps = 10000);

/// One forward recursion step X' = Q_1 + M_1 X with Z_1 ~ H(Z_0, ·).
StationaryDraw advance_one_step(const ModelSpec& spec, const StationaryDraw& draw, Rng& rng);

std::vector<double> norms(const std::vector<StationaryDraw>& draws);
std::vector<Vector> values(const std::vector<StationaryDraw>& draws);

}  // namespace heavytail
