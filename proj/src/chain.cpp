#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/model.hpp"

namespace heavytail {

namespace {

std::vector<bool> reachable_from(const Matrix& h, int start, bool transpose) {
  const auto n = static_cast<int>(h.rows());
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      const double w = transpose ? h(j, i) : h(i, j);
      if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

std::vector<double> cumulative(const Vector& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

void check_stochastic(const Matrix& h) {
  if (h.rows() == 0 || h.rows() != h.cols()) {
    throw ValidationError("transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if ((h.row(i).array() < 0.0).any() || !h.row(i).allFinite()) {
      throw ValidationError("row not stochastic");
    }
    if (std::abs(h.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw ValidationError("row not stochastic");
    }
  }
}

}  // namespace

bool is_irreducible(const Matrix& h) {
  const auto forward = reachable_from(h, 0, false);
  const auto backward = reachable_from(h, 0, true);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

Vector stationary_distribution(const Matrix& h) {
  const Eigen::Index n = h.rows();
  // (H^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix a = h.transpose() - Matrix::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw NumericalError("stationary solve failed");
  Vector pi = lu.solve(rhs);
  if (!pi.allFinite() || (pi.array() < -kStationaryTolerance).any()) {
    throw NumericalError("stationary solve failed");
  }
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  if ((pi.transpose() * h - pi.transpose()).cwiseAbs().maxCoeff() > kStationaryTolerance) {
    throw NumericalError("stationary solve failed");
  }
  return pi;
}

TransitionMatrix TransitionMatrix::from_matrix(const Matrix& h) {
  check_stochastic(h);
  if (!is_irreducible(h)) throw ValidationError("chain not irreducible");

  TransitionMatrix t;
  t.h_ = h;
  t.pi_ = stationary_distribution(h);
  if ((t.pi_.array() <= 0.0).any()) throw NumericalError("stationary solve failed");

  const Eigen::Index n = h.rows();
  t.reversed_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) t.reversed_(i, j) = t.pi_(j) * h(j, i) / t.pi_(i);
  }
  t.pi_cdf_ = cumulative(t.pi_);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.forward_cdf_.push_back(cumulative(h.row(i).transpose()));
    t.backward_cdf_.push_back(cumulative(t.reversed_.row(i).transpose()));
  }
  return t;
}

int TransitionMatrix::sample_row(const std::vector<double>& cdf, Rng& rng) {
  if (cdf.size() == 1) return 0;
  // Scale by the row total so rounding in the cumulative sum never strands mass.
  const double u = uniform01(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<int>(std::distance(cdf.begin(), it));
  return std::min(idx, static_cast<int>(cdf.size()) - 1);
}

}  // namespace heavytail
