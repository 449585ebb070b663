#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/estimate.hpp"
#include "heavytail/verify.hpp"

namespace heavytail {
namespace {

using testing::pareto;
using testing::vec;

std::vector<double> pareto_sample(double alpha, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::pow(uniform_open0(rng), -1.0 / alpha);
  return xs;
}

std::vector<Vector> innovation_sample(const InnovationLaw& law, double alpha, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> xs(n);
  for (auto& x : xs) sample_innovation(law, alpha, rng, x);
  return xs;
}

TEST(Hill, HandComputed) {
  const std::vector<double> xs{8, 4, 2, 1};
  const auto h = hill_estimator(xs, 2);
  EXPECT_NEAR(h.value, 1.0 / std::log(std::pow(2.0, 1.5)), 1e-14);
  EXPECT_NEAR(h.se, h.value / std::sqrt(2.0), 1e-14);
}

TEST(Hill, ExactParetoWithinThreeSe) {
  const auto xs = pareto_sample(2.0, 100000, 1);
  const auto h = hill_estimator(xs, default_k(xs.size()));
  EXPECT_EQ(h.n, 100000u);
  EXPECT_NEAR(h.value, 2.0, 3.0 * h.se);
}

TEST(Hill, ScaleInvariantExactly) {
  auto xs = pareto_sample(1.3, 5000, 2);
  const auto before = hill_estimator(xs, 300);
  for (auto& x : xs) x *= 8.0;  // power of two keeps the ratios bitwise equal
  EXPECT_EQ(hill_estimator(xs, 300).value, before.value);
  for (auto& x : xs) x *= 0.37;
  EXPECT_NEAR(hill_estimator(xs, 300).value, before.value, 1e-12 * before.value);
}

TEST(Hill, Errors) {
  const std::vector<double> xs{3, 2, 1};
  EXPECT_THROW(hill_estimator(xs, 3), ValidationError);
  const std::vector<double> neg{3, -2, 1};
  EXPECT_THROW(hill_estimator(neg, 1), ValidationError);
  const std::vector<double> flat{2, 2, 2, 2};
  try {
    hill_estimator(flat, 2);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "degenerate tail");
  }
}

TEST(Hill, PlotMatchesPointEstimates) {
  const auto xs = pareto_sample(1.5, 2000, 3);
  const std::vector<std::size_t> ks{10, 100, 500};
  const auto plot = hill_plot(xs, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) EXPECT_EQ(plot[i].value, hill_estimator(xs, ks[i]).value);
}

TEST(Spectral, FaceCellTiesAndSigns) {
  EXPECT_EQ(face_cell(vec({1.0, 0.5})), 0u);
  EXPECT_EQ(face_cell(vec({-1.0, 0.5})), 1u);
  EXPECT_EQ(face_cell(vec({0.2, -3.0})), 3u);
  EXPECT_EQ(face_cell(vec({2.0, 2.0})), 0u);  // lowest index wins
}

TEST(Spectral, RayGivesPointMass) {
  std::vector<Vector> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(vec({static_cast<double>(i), 0.0}));
  xs.push_back(vec({0.0, 0.0}));
  const auto s = empirical_spectral_measure(xs, 50);
  EXPECT_EQ(s.counts[0], 50u);
  EXPECT_DOUBLE_EQ(s.measure.total_weight(), 1.0);
  EXPECT_EQ(s.zero_dropped, 1u);
}

TEST(Spectral, SymmetricAtomsSplitEvenly) {
  const auto law = pareto({{vec({1.0, 0.0}), 0.5}, {vec({-1.0, 0.0}), 0.5}});
  const auto xs = innovation_sample(law, 1.0, 100000, 4);
  const std::size_t k = default_k(xs.size());
  const auto s = empirical_spectral_measure(xs, k);
  const double se = std::sqrt(0.25 / static_cast<double>(k));
  EXPECT_NEAR(s.measure.atoms[0].weight, 0.5, 3.0 * se);
  EXPECT_NEAR(s.measure.atoms[1].weight, 0.5, 3.0 * se);
  EXPECT_NEAR(s.measure.total_weight(), 1.0, 1e-15);
}

TEST(Spectral, CustomCellsAndUnassigned) {
  std::vector<Vector> xs{vec({1.0, 0.1}), vec({0.1, 1.0}), vec({-1.0, -1.0})};
  AngularSet a;
  a.balls.push_back({vec({1.0, 0.0}), 0.2});
  AngularSet b;
  b.balls.push_back({vec({0.0, 1.0}), 0.2});
  const auto s = empirical_spectral_measure(xs, 3, {a, b});
  EXPECT_EQ(s.used, 2u);
  EXPECT_EQ(s.unassigned, 1u);
  EXPECT_DOUBLE_EQ(s.measure.atoms[0].weight, 0.5);
}

TEST(Spectral, AllZeroIsAnError) {
  std::vector<Vector> xs(5, vec({0.0, 0.0}));
  try {
    empirical_spectral_measure(xs, 2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "no angular data");
  }
}

TEST(ConeMeasure, ExactParetoScalar) {
  const auto xs = innovation_sample(pareto({{vec({1.0}), 1.0}}), 1.0, 1000000, 5);
  const auto r = empirical_cone_measure(xs, ConeSet{"all", 10.0, AngularSet::all()}, 1.0);
  EXPECT_NEAR(r.value, 1.0, 3.0 * r.se);
  EXPECT_TRUE(r.flags.empty());
  EXPECT_EQ(empirical_cone_measure(xs, ConeSet{"none", 10.0, AngularSet::none()}, 1.0).value, 0.0);
}

TEST(ConeMeasure, AdditiveAndMonotone) {
  const auto law = pareto({{vec({1.0, 0.0}), 0.3}, {vec({0.5, 1.0}), 0.3}, {vec({-1.0, -1.0}), 0.4}}, 1.0, 0.4);
  const auto xs = innovation_sample(law, 1.5, 200000, 6);
  ConeSet a{"a", 5.0, {}};
  a.angular.balls = {{vec({1.0, 0.0}), 0.3}};
  ConeSet b{"b", 5.0, {}};
  b.angular.balls = {{vec({0.5, 1.0}), 0.3}};
  ConeSet both{"ab", 5.0, {}};
  both.angular.balls = {a.angular.balls[0], b.angular.balls[0]};
  const double ra = empirical_cone_measure(xs, a, 1.5).value;
  const double rb = empirical_cone_measure(xs, b, 1.5).value;
  const double rab = empirical_cone_measure(xs, both, 1.5).value;
  EXPECT_NEAR(ra + rb, rab, 1e-12 * rab);
  EXPECT_LE(rab, empirical_cone_measure(xs, ConeSet{"all", 5.0, AngularSet::all()}, 1.5).value);
}

TEST(ConeMeasure, LowCountFlag) {
  const std::vector<Vector> xs{vec({100.0}), vec({1.0}), vec({2.0})};
  const auto r = empirical_cone_measure(xs, ConeSet{"c", 10.0, AngularSet::all()}, 1.0);
  EXPECT_TRUE(r.flagged(kLowCountFlag));
  EXPECT_EQ(r.meta.at("exceedances"), 1.0);
}

TEST(ConeMeasure, ConvergesToClosedFormLimit) {
  const auto law = pareto({{vec({1.0, 0.0}), 0.6}, {vec({-0.5, 1.0}), 0.4}}, 2.0);
  const auto xs = innovation_sample(law, 1.2, 1000000, 7);
  const auto mu = limit_measure(law, 1.2);
  ConeSet cone{"c", 10.0, {}};
  cone.angular.balls = {{vec({-0.5, 1.0}), 0.25}};
  const double limit = limit_measure_eval(mu, cone) * std::pow(10.0, 1.2);
  const double emp = empirical_cone_measure(xs, cone, 1.2).value;
  EXPECT_LT(std::abs(emp - limit) / limit, 0.10);
}

TEST(Projection, ParetoOnAxis) {
  const auto xs = innovation_sample(pareto({{vec({1.0, 0.0}), 1.0}}), 1.0, 1000000, 8);
  const auto r = projection_tail(xs, vec({1.0, 0.0}), 50.0, 1.0);
  EXPECT_NEAR(r.value, 1.0, 3.0 * r.se);
  EXPECT_EQ(projection_tail(xs, vec({0.0, 1.0}), 50.0, 1.0).value, 0.0);
}

TEST(Projection, Homogeneity) {
  const double alpha = 1.5;
  const auto xs = innovation_sample(pareto({{vec({1.0, 0.0}), 0.5}, {vec({0.0, 1.0}), 0.5}}), alpha, 1000000, 9);
  const Vector y = vec({1.0, 1.0});
  const double t = 40.0;
  const auto one = projection_tail(xs, y, t, alpha);
  const auto two = projection_tail(xs, 2.0 * y, t, alpha);
  EXPECT_NEAR(two.value, std::pow(2.0, alpha) * one.value, 3.0 * std::hypot(two.se, std::pow(2.0, alpha) * one.se));
}

TEST(Projection, RejectsZeroDirection) {
  const std::vector<Vector> xs{vec({1.0})};
  EXPECT_THROW(projection_tail(xs, vec({0.0}), 1.0, 1.0), ValidationError);
}

}  // namespace
}  // namespace heavytail
