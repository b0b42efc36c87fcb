#include "gaussbv/errors.hpp"
#include "gaussbv/semigroup.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gaussbv;

namespace {

// max |u - f| over nodes with |x| <= core
double core_error(const GridField& u, const std::function<double(double)>& f, double core) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u.grid().point(i)[0];
    if (std::abs(x) <= core) e = std::max(e, std::abs(u[i] - f(x)));
  }
  return e;
}

}  // namespace

TEST(Mehler, PolynomialsAgainstClosedForm) {
  auto d = GaussianGrid::standard(1, 769, 9.0);
  const double t = 0.3, a = std::exp(-t), b2 = 1.0 - std::exp(-2.0 * t);
  const auto x2 = GridField::from_function(d, [](auto x) { return x[0] * x[0]; });
  EXPECT_LT(core_error(ou_apply(x2, t), [&](double x) { return a * a * x * x + b2; }, 3.0), 2e-4);
  const auto x1 = GridField::from_function(d, [](auto x) { return x[0]; });
  EXPECT_LT(core_error(ou_apply(x1, t), [&](double x) { return a * x; }, 6.0), 1e-9);
}

TEST(Mehler, CosineClosedFormAndGradient) {
  auto d = GaussianGrid::standard(1, 513);
  const auto u = GridField::from_function(d, [](auto x) { return std::cos(x[0]); });
  for (double t : {0.05, 0.5, 2.0}) {
    const double a = std::exp(-t), damp = std::exp(-(1.0 - a * a) / 2.0);
    EXPECT_LT(core_error(ou_apply(u, t), [&](double x) { return damp * std::cos(a * x); }, 4.0), 2e-4) << t;
    const auto g = ou_gradient(u, t);
    EXPECT_LT(core_error(g.component_field(0), [&](double x) { return -a * damp * std::sin(a * x); }, 4.0), 2e-4);
  }
}

TEST(Mehler, NonCenteredDiagonalMeasure) {
  Matrix q = Matrix::Zero(1, 1);
  q(0, 0) = 4.0;
  Vector m(1);
  m << 1.0;
  auto d = GaussianGrid::create(UniformGrid(1, 401, 14.0), GaussianMeasure(m, q));
  const auto u = GridField::from_function(d, [](auto x) { return x[0] - 1.0; });
  const double t = 0.7;
  const auto tu = ou_apply(u, t);
  for (std::size_t i = 100; i < 300; i += 20) {
    EXPECT_NEAR(tu[i], std::exp(-t) * (d->grid().point(i)[0] - 1.0), 1e-10);
  }
}

TEST(Mehler, PreservesIntegralAndContractsL1) {
  auto d = GaussianGrid::standard(2, 65);
  const auto u = GridField::from_function(d, [](auto x) { return x[0] > 0.3 ? 1.0 : 0.0; });
  const auto tu = ou_apply(u, 0.2);
  EXPECT_NEAR(integrate(tu), integrate(u), 2e-3);
  for (double v : tu.values()) {
    EXPECT_GE(v, -1e-12);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(Mehler, RejectsNonDiagonalAndNegativeTime) {
  Matrix q(2, 2);
  q << 1.0, 0.3, 0.3, 1.0;
  auto d = GaussianGrid::create(UniformGrid(2, 33), GaussianMeasure(Vector::Zero(2), q));
  EXPECT_THROW(ou_apply(GridField::constant(d, 1.0), 0.1), UnsupportedError);
  auto s = GaussianGrid::standard(1, 33);
  EXPECT_THROW(ou_apply(GridField::constant(s, 1.0), -0.1), DomainError);
}

TEST(Commutation, SmallOnPolynomials) {
  auto d = GaussianGrid::standard(1, 769, 9.0);
  const auto u = GridField::from_function(d, [](auto x) { return x[0] * x[0] * x[0] - x[0]; });
  EXPECT_LT(commutation_residual(u, 0.5), 1e-5);
}

TEST(L1Constant, ClosedFormAndShortTimeAsymptotics) {
  // Substituting v = e^{-s} gives c_t = sqrt(2/pi) arccos(e^{-t}).
  for (double t : {1e-4, 0.01, 0.3, 2.0}) {
    EXPECT_NEAR(ou_l1_constant(t), std::sqrt(2.0 / std::numbers::pi) * std::acos(std::exp(-t)), 1e-9) << t;
  }
  // c_t ~ 2 sqrt(t / pi).
  EXPECT_NEAR(ou_l1_constant(1e-6) / (2.0 * std::sqrt(1e-6 / std::numbers::pi)), 1.0, 1e-5);
}

TEST(L1Bound, HalfspaceWithinBound) {
  auto d = GaussianGrid::standard(1, 257);
  const auto chi = GridField::from_function(d, [](auto x) { return x[0] > 0.0 ? 1.0 : 0.0; });
  const auto c = ou_l1_bound_check(chi, 0.05, 1.0 / std::sqrt(2.0 * std::numbers::pi));
  EXPECT_TRUE(c.pass);
  EXPECT_GT(c.lhs, 0.5 * c.c_t * c.perimeter);
}

TEST(Heat, AddsVarianceToQuadratic) {
  auto d = GaussianGrid::standard(1, 401, 10.0);
  const auto u = GridField::from_function(d, [](auto x) { return x[0] * x[0]; });
  const auto w = heat_apply(u, 0.25);
  EXPECT_LT(core_error(w, [](double x) { return x * x + 0.25; }, 4.0), 1e-3);
  EXPECT_THROW(heat_apply(u, 0.0), DomainError);
  EXPECT_EQ(heat_apply(u, 0.0, true).values(), u.values());
}
