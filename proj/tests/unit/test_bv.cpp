#include "gaussbv/bv.hpp"
#include "gaussbv/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gaussbv;

namespace {

const boost::math::normal_distribution<double> kStd;
double phi(double x) { return boost::math::pdf(kStd, x); }
double cdf(double x) { return boost::math::cdf(kStd, x); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Extrapolation, ExactOnPolynomials) {
  const std::vector<double> t{0.4, 0.2, 0.1, 0.05};
  std::vector<double> v;
  for (double s : t) v.push_back(3.0 - 2.0 * s + 5.0 * s * s);
  EXPECT_NEAR(extrapolate_to_zero(t, v, 2), 3.0, 1e-12);
  EXPECT_NEAR(extrapolate_to_zero({1.0, 2.0}, {1.0, 2.0}, 5), 0.0, 1e-12);
}

TEST(TimeFloor, TwiceSpacingSquared) {
  const UniformGrid g(1, 121, 6.0);
  EXPECT_DOUBLE_EQ(time_floor(g), 0.04);
}

TEST(Perimeter, HalfspacesMatchProfile) {
  auto d = GaussianGrid::standard(1, 257);
  for (double a : {0.0, 1.0}) {
    const auto e = IndicatorSet::halfspace(d, vec({1.0}), a);
    const auto r = perimeter(e);
    EXPECT_LT(rel(r.tv_semigroup, phi(a)), 0.01) << a;
    EXPECT_LT(rel(r.tv_dual, phi(a)), 0.02) << a;
    EXPECT_LT(r.spread, 0.02);
    const auto iso = isoperimetric_check(e);
    EXPECT_TRUE(iso.pass);
    EXPECT_TRUE(iso.equality);
  }
}

TEST(Perimeter, DiskClosedForm) {
  // P(B_r) = 2 pi r (2 pi)^{-1} e^{-r^2/2} in the plane.
  auto d = GaussianGrid::standard(2, 257);
  const double p = tv_semigroup(IndicatorSet::ball(d, vec({0.0, 0.0}), 1.0).membership());
  EXPECT_LT(rel(p, std::exp(-0.5)), 0.01);
  const auto iso = isoperimetric_check(IndicatorSet::ball(d, vec({0.0, 0.0}), 1.0));
  EXPECT_TRUE(iso.pass);
  EXPECT_FALSE(iso.equality);
}

TEST(Perimeter, DualHistoryIsMonotoneLowerBound) {
  auto d = GaussianGrid::standard(1, 257);
  const auto e = IndicatorSet::ball(d, vec({0.0}), 1.0);
  const auto r = tv_dual_detailed(e.membership());
  ASSERT_FALSE(r.history.empty());
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_GE(r.history[k], r.history[k - 1] - 1e-14);
  EXPECT_LT(rel(r.value, 2.0 * phi(1.0)), 0.02);
  EXPECT_EQ(tv_dual(e.membership(), 100, 4), tv_dual(e.membership(), 100, 4));
}

TEST(SmoothVariation, LinearAndIndicator) {
  auto d = GaussianGrid::standard(2, 257);
  const auto u = GridField::from_function(d, [](auto x) { return 3.0 * x[0] + 4.0 * x[1]; });
  EXPECT_NEAR(tv_smooth(u), 5.0, 1e-3);
  const auto r = tv_report(u, true);
  EXPECT_LT(r.spread, 0.02);
  EXPECT_THROW(tv_smooth(IndicatorSet::halfspace(d, vec({1.0, 0.0}), 0.0).membership()), DomainError);
}

TEST(Directional, HalfspaceAlongAndAcrossNormal) {
  auto d = GaussianGrid::standard(2, 257);
  const auto e = IndicatorSet::halfspace(d, vec({1.0, 0.0}), 0.5);
  EXPECT_LT(rel(tv_directional(e.membership(), vec({1.0, 0.0})), phi(0.5)), 0.02);
  EXPECT_NEAR(tv_directional(e.membership(), vec({0.0, 1.0})), 0.0, 1e-12);
  EXPECT_TRUE(slicing_check(e.membership(), 0).pass);
}

TEST(Minkowski, HalfspaceContentIsPerimeter) {
  auto d = GaussianGrid::standard(1, 513);
  const auto e = IndicatorSet::halfspace(d, vec({1.0}), 0.0);
  EXPECT_LT(rel(minkowski_content(e, default_minkowski_radii(d->grid())), phi(0.0)), 0.01);
}

TEST(Density, HalfspaceLabels) {
  auto d = GaussianGrid::standard(1, 129);
  const auto e = IndicatorSet::halfspace(d, vec({1.0}), 0.0);
  const auto c = density_classify(e, default_density_schedule(d->grid()));
  ASSERT_EQ(c.labels.size(), d->size());
  EXPECT_EQ(c.labels[64], DensityLabel::half);
  EXPECT_EQ(c.labels[100], DensityLabel::interior);
  EXPECT_EQ(c.labels[10], DensityLabel::exterior);
  EXPECT_FALSE(c.essential_boundary().empty());
}

TEST(Coarea, IdentityFunction) {
  auto d = GaussianGrid::standard(1, 257);
  const auto u = GridField::from_function(d, [](auto x) { return x[0]; });
  const auto c = coarea_check(u, default_coarea_levels(u));
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.lhs, 1.0, 1e-3);
}

TEST(BoxGrowth, RadiiSolveDefiningEquationAndPerimetersMatchProduct) {
  const auto b = box_perimeter_growth(6);
  ASSERT_EQ(b.radii.size(), 6u);
  for (int i = 1; i <= 6; ++i) {
    const double r = b.radii[i - 1];
    const double lhs = std::sqrt(2.0 / std::numbers::pi) * std::exp(-r * r / 2.0) / r;
    const double rhs = 1.0 / ((i + 1) * std::pow(std::log(i + 1.0), 1.5));
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-10) << i;
  }
  // P(prod [-r_i, r_i]) = sum_i 2 phi(r_i) prod_{j != i} (2 Phi(r_j) - 1).
  for (int m = 1; m <= 6; ++m) {
    double p = 0.0;
    for (int i = 0; i < m; ++i) {
      double term = 2.0 * phi(b.radii[i]);
      for (int j = 0; j < m; ++j)
        if (j != i) term *= 2.0 * cdf(b.radii[j]) - 1.0;
      p += term;
    }
    EXPECT_NEAR(b.perimeters[m - 1], p, 1e-10) << m;
  }
}

TEST(SobolevIsoperimetric, HoldsForLinear) {
  auto d = GaussianGrid::standard(1, 257);
  const auto c = sobolev_isoperimetric_check(GridField::from_function(d, [](auto x) { return x[0]; }));
  EXPECT_TRUE(c.pass);
  EXPECT_GE(c.lhs, c.rhs * (1.0 - 1e-3));
}

TEST(BallProfile, MatchesClosedForm) {
  auto d = GaussianGrid::standard(2, 257);
  const std::vector<double> radii{2.0, 1.0, 0.5};
  const auto g = ball_perimeter_profile(d, vec({0.0, 0.0}), radii);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    EXPECT_LT(rel(g[k], radii[k] * std::exp(-radii[k] * radii[k] / 2.0)), 0.03) << radii[k];
  }
}

TEST(Schedule, BelowFloorRejected) {
  auto d = GaussianGrid::standard(1, 65);
  const auto e = IndicatorSet::halfspace(d, vec({1.0}), 0.0);
  EXPECT_THROW(tv_semigroup(e.membership(), {0.04, 0.001}), GridError);
}
