#include "gaussbv/errors.hpp"
#include "gaussbv/variational.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gaussbv;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Conjugates, AnalyticForms) {
  const auto norm = ConvexIntegrand::norm();
  EXPECT_EQ(conjugate(norm, vec2(0.3, 0.4)), 0.0);
  EXPECT_EQ(conjugate(norm, vec2(3.0, 4.0)), kPlusInfinity);
  EXPECT_NEAR(conjugate(ConvexIntegrand::half_squared(), vec2(3.0, 4.0)), 12.5, 1e-14);
  EXPECT_NEAR(conjugate(ConvexIntegrand::area(), vec2(0.6, 0.0)), -0.8, 1e-14);
}

TEST(Conjugates, NumericAgreesWithAnalytic) {
  for (const auto& f : {ConvexIntegrand::half_squared(), ConvexIntegrand::area()}) {
    for (const Vector& p : {vec2(0.3, -0.2), vec2(0.0, 0.5)}) {
      EXPECT_NEAR(conjugate_numeric(f, p), conjugate(f, p), 1e-6) << f.name;
    }
  }
  EXPECT_EQ(conjugate_numeric(ConvexIntegrand::area(), vec2(2.0, 0.0)), kPlusInfinity);
}

TEST(Recession, LinearAndSuperlinear) {
  const Vector h = vec2(3.0, 4.0);
  EXPECT_NEAR(recession(ConvexIntegrand::norm(), h), 5.0, 1e-12);
  EXPECT_NEAR(recession_numeric(ConvexIntegrand::area(), h), 5.0, 1e-4);
  EXPECT_EQ(recession_numeric(ConvexIntegrand::half_squared(), h), kPlusInfinity);
}

TEST(Functional, SmoothAndSingularParts) {
  auto d = GaussianGrid::standard(1, 257);
  const auto u = GridField::from_function(d, [](auto x) { return 2.0 * x[0]; });
  EXPECT_NEAR(functional_eval(ConvexIntegrand::norm(), u), 2.0, 1e-6);
  EXPECT_NEAR(functional_eval(ConvexIntegrand::half_squared(), u), 2.0, 1e-6);
  HMeasureDecomposition dec{HVectorField::zero(d), {{0.25, Vector::Ones(1)}}};
  EXPECT_NEAR(functional_eval(ConvexIntegrand::area(), dec), 1.0 + 0.25, 1e-8);
  EXPECT_THROW(functional_eval(ConvexIntegrand::half_squared(), dec), DomainError);
}

TEST(Functional, DualBoundBelowPrimal) {
  auto d = GaussianGrid::standard(1, 129);
  const auto u = GridField::from_function(d, [](auto x) { return std::sin(x[0]); });
  const double primal = functional_eval(ConvexIntegrand::norm(), u);
  const double dual = functional_eval_dual(ConvexIntegrand::norm(), u, 400);
  EXPECT_LE(dual, primal * (1.0 + 1e-3));
  EXPECT_GT(dual, 0.95 * primal);
}

TEST(Rof, QuadraticHalvesLinearData) {
  // argmin 1/2 |grad u|^2 + 1/2 (u - x)^2 is x/2: T x = x, L x = -x.
  auto d = GaussianGrid::standard(1, 129);
  const auto g = GridField::from_function(d, [](auto x) { return x[0]; });
  const auto s = rof_minimize(ConvexIntegrand::half_squared(), g, 1e-8, 50000);
  EXPECT_LT(s.gap, 1e-8);
  double e2 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    e2 += d->weights()[i] * std::pow(s.minimizer[i] - g[i] / 2.0, 2);
    n2 += d->weights()[i] * g[i] * g[i] / 4.0;
  }
  EXPECT_LT(std::sqrt(e2 / n2), 0.01);
  for (std::size_t k = 1; k < s.objective_trace.size(); ++k) EXPECT_LE(s.objective_trace[k], s.objective_trace[k - 1]);
}

TEST(Rof, NonConvergenceReportsGap) {
  auto d = GaussianGrid::standard(1, 129);
  const auto g = GridField::from_function(d, [](auto x) { return x[0] > 0 ? 1.0 : 0.0; });
  try {
    rof_minimize(ConvexIntegrand::norm(), g, 1e-14, 3);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 1e-14);
  }
}

TEST(Rof, OperatorNormPositiveAndStable) {
  auto d = GaussianGrid::standard(1, 65);
  const double a = gradient_operator_norm(d, 200);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(a, gradient_operator_norm(d, 400), 1e-3 * a);
}

TEST(Convexity, SecondDifferences) {
  // Tolerance is 10 h^2 max|u|; at 257 nodes it sits well below the curvature of the concave case.
  auto d = GaussianGrid::standard(2, 257);
  EXPECT_TRUE(convexity_check(GridField::from_function(d, [](auto x) { return x[0] * x[0] + std::abs(x[1]); })).pass);
  EXPECT_FALSE(convexity_check(GridField::from_function(d, [](auto x) { return -x[0] * x[1] * x[1]; })).pass);
  // Concave only outside the core.
  const auto u = GridField::from_function(d, [](auto x) { return std::abs(x[0]) < 5.0 ? x[0] * x[0] : 25.0; });
  EXPECT_FALSE(convexity_check(u).pass);
  EXPECT_TRUE(convexity_check(u, 4.5).pass);
}

TEST(RelaxedPerimeter, ConstantHalfAndRange) {
  auto d = GaussianGrid::standard(1, 129);
  EXPECT_NEAR(relaxed_perimeter(GridField::constant(d, 0.5)), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-6);
  EXPECT_NEAR(relaxed_perimeter(GridField::constant(d, 0.0), RangeConvention::signed_),
              1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-6);
  EXPECT_THROW(relaxed_perimeter(GridField::constant(d, 1.5)), DomainError);
  const auto w = weak_lsc_witness(GaussianGrid::standard(2, 257), 4);
  ASSERT_EQ(w.perimeters.size(), 4u);
  for (double p : w.perimeters) EXPECT_NEAR(p, 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.01);
  EXPECT_FALSE(w.limit_is_indicator);
}
