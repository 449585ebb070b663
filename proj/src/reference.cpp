#include <cmath>
#include <limits>

#include "heavytail/reference.hpp"

namespace heavytail::reference {

std::vector<Vector> stationary_horner(const ModelSpec& spec, int depth, std::size_t reps, Seed seed) {
  std::vector<Vector> out;
  out.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = replica_stream(seed, r);
    std::vector<CoefficientPair> pairs;
    int z = spec.chain().sample_stationary(rng);
    for (int j = 0; j <= depth; ++j) {
      if (j > 0) z = spec.chain().step_backward(z, rng);
      pairs.push_back(sample_regime_pair(spec, z, rng));
    }
    Vector x = pairs.back().q;
    for (auto it = pairs.rbegin() + 1; it != pairs.rend(); ++it) x = it->q + it->m * x;
    out.push_back(std::move(x));
  }
  return out;
}

Matrix direct_product(const ModelSpec& spec, int m, Rng& rng) {
  Matrix prod = Matrix::Identity(spec.d(), spec.d());
  int z = spec.chain().sample_stationary(rng);
  for (int j = 0; j < m; ++j) {
    if (j > 0) z = spec.chain().step_backward(z, rng);
    prod = prod * sample_regime_pair(spec, z, rng).m;
  }
  return prod;
}

std::vector<double> log_norms(const ModelSpec& spec, int m, std::size_t reps, Seed seed) {
  std::vector<double> out;
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = replica_stream(seed, r);
    const double norm = op_norm(direct_product(spec, m, rng));
    out.push_back(norm > 0.0 ? std::log(norm) : -std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace heavytail::reference
