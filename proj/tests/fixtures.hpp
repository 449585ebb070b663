#pragma once

#include <cstdlib>
#include <string>

#include "heavytail/config.hpp"
#include "heavytail/model.hpp"

namespace heavytail::testing {

inline std::string source_dir() {
  const char* dir = std::getenv("HEAVYTAIL_SOURCE_DIR");
  return dir != nullptr ? dir : "..";
}

inline std::string config_path(const std::string& name) { return source_dir() + "/configs/" + name; }

inline ParetoInnovation pareto(std::vector<WeightedDirection> atoms, double scale = 1.0, double perturbation = 0.0) {
  return ParetoInnovation{AtomicSpectralMeasure{std::move(atoms)}, scale, perturbation};
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Matrix scalar_matrix(double c, int d = 1) { return c * Matrix::Identity(d, d); }

/// One regime, d = 1, Pareto(alpha, scale) on +1, M ≡ c.
inline ModelSpec scalar_geometric(double alpha, double beta, double c, double scale = 1.0) {
  RegimeLaw r{pareto({{vec({1.0}), 1.0}}, scale), DeterministicMatrix{scalar_matrix(c)}, false};
  return ModelSpec(1, alpha, beta, {r}, Matrix::Ones(1, 1));
}

/// Two equally likely iid deterministic scalars a, b with Pareto(alpha) innovation on +1.
inline ModelSpec iid_two_point(double a, double b, double alpha, double beta) {
  RegimeLaw ra{pareto({{vec({1.0}), 1.0}}), DeterministicMatrix{scalar_matrix(a)}, false};
  RegimeLaw rb{pareto({{vec({1.0}), 1.0}}), DeterministicMatrix{scalar_matrix(b)}, false};
  return ModelSpec(1, alpha, beta, {ra, rb}, Matrix::Constant(2, 2, 0.5));
}

}  // namespace heavytail::testing
