#pragma once

#include <cstddef>
#include <vector>

#include "heavytail/model.hpp"
#include "heavytail/rng.hpp"

// Plain serial versions of the parallel kernels. They consume random numbers in
// exactly the same order, so the tests can compare results draw for draw.
namespace heavytail::reference {

/// Backward series evaluated by Horner's rule from the deepest term:
/// X = Q_0 + M_0 (Q_{-1} + M_{-1} (... Q_{-K})).
std::vector<Vector> stationary_horner(const ModelSpec& spec, int depth, std::size_t reps, Seed seed);

/// Product M_0 M_{-1} ... M_{-(m-1)} multiplied out without rescaling.
Matrix direct_product(const ModelSpec& spec, int m, Rng& rng);

/// log op_norm of the m-factor product per replica, one replica at a time.
std::vector<double> log_norms(const ModelSpec& spec, int m, std::size_t reps, Seed seed);

}  // namespace heavytail::reference
