#pragma once

#include <Eigen/Dense>

namespace heavytail {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sup-norm: largest absolute component.
inline double sup_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Operator norm induced by the sup-norm, i.e. the maximum absolute row sum.
inline double op_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Direction x/‖x‖ on the sup-norm unit sphere; caller guarantees x != 0.
inline Vector direction(const Vector& x) { return x / sup_norm(x); }

}  // namespace heavytail
