#include "gaussbv/errors.hpp"
#include "gaussbv/gauss_core.hpp"

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gaussbv;

namespace {

const boost::math::normal_distribution<double> kStd;

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST(NormalHelpers, CdfMatchesBoostIncludingTails) {
  for (double x : {-30.0, -8.0, -1.5, 0.0, 0.3, 2.0, 8.0}) {
    EXPECT_NEAR(normal_cdf(x) / boost::math::cdf(kStd, x), 1.0, 1e-13) << x;
    EXPECT_NEAR(normal_sf(x) / boost::math::cdf(boost::math::complement(kStd, x)), 1.0, 1e-13) << x;
    EXPECT_NEAR(normal_pdf(x), boost::math::pdf(kStd, x), 1e-15 + 1e-14 * normal_pdf(x));
  }
}

TEST(NormalHelpers, QuantileInvertsCdf) {
  for (double p : {1e-300, 1e-12, 0.01, 0.5, 0.9, 1.0 - 1e-12}) {
    EXPECT_NEAR(normal_quantile(p), boost::math::quantile(kStd, p), 1e-9 * (1.0 + std::abs(normal_quantile(p))));
  }
  EXPECT_THROW(normal_quantile(0.0), DomainError);
  EXPECT_THROW(normal_quantile(1.0), DomainError);
  EXPECT_THROW(normal_quantile(-0.1), DomainError);
}

TEST(IsoperimetricProfile, EndpointsSymmetryAndMidpoint) {
  EXPECT_EQ(isoperimetric_profile(0.0), 0.0);
  EXPECT_EQ(isoperimetric_profile(1.0), 0.0);
  EXPECT_NEAR(isoperimetric_profile(0.5), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  for (double t : {0.01, 0.2, 0.37}) EXPECT_NEAR(isoperimetric_profile(t), isoperimetric_profile(1.0 - t), 1e-12);
  // U(Phi(-a)) = phi(a): the halfspace perimeter.
  for (double a : {0.0, 0.5, 2.0}) {
    EXPECT_NEAR(isoperimetric_profile(boost::math::cdf(kStd, -a)), boost::math::pdf(kStd, a), 1e-12);
  }
}

TEST(IsoperimetricProfile, SmallVolumeAsymptotics) {
  // U(t) ~ t sqrt(2 log(1/t)) as t -> 0, approached from below.
  double previous = 0.0;
  for (double t : {1e-4, 1e-16, 1e-64, 1e-256}) {
    const double ratio = isoperimetric_profile(t) / (t * std::sqrt(2.0 * std::log(1.0 / t)));
    EXPECT_LT(ratio, 1.0);
    EXPECT_GT(ratio, previous);
    previous = ratio;
  }
  EXPECT_GT(previous, 0.99);
}

TEST(GaussHermite, WeightsSumToOneAndMomentsExact) {
  for (int n : {4, 9, 20}) {
    const Rule1D r = gauss_hermite_rule(n);
    ASSERT_EQ(r.nodes.size(), static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double w : r.weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-14);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double m = 0.0, scale = 0.0;
      for (int i = 0; i < n; ++i) {
        m += r.weights[i] * std::pow(r.nodes[i], k);
        scale += r.weights[i] * std::pow(std::abs(r.nodes[i]), k);
      }
      const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
      EXPECT_NEAR(m, exact, 1e-12 * scale) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Trapezoid, WeightsSumToBoxLength) {
  const Rule1D r = trapezoid_rule(11, 3.0);
  double sum = 0.0;
  for (double w : r.weights) sum += w;
  EXPECT_NEAR(sum, 6.0, 1e-14);
  EXPECT_DOUBLE_EQ(r.nodes.front(), -3.0);
  EXPECT_DOUBLE_EQ(r.nodes.back(), 3.0);
}

TEST(Quadrature, SecondMomentsOfShiftedMeasure) {
  Matrix q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  Vector a(2);
  a << 0.3, -1.0;
  const GaussianMeasure m(a, q);
  const auto gh = build_quadrature(2, QuadratureKind::gauss_hermite, 8);
  EXPECT_NEAR(gh.expectation([](auto x) { return x[0] * x[0]; }, m), 2.0 + 0.09, 1e-12);
  EXPECT_NEAR(gh.expectation([](auto x) { return x[0] * x[1]; }, m), 0.5 - 0.3, 1e-12);
  const auto box = build_quadrature(1, QuadratureKind::uniform_truncated, 401, 8.0);
  EXPECT_NEAR(box.expectation([](auto x) { return x[0] * x[0]; }, GaussianMeasure::standard(1)), 1.0, 1e-8);
}

TEST(GaussianMeasure, DensityAndPrecision) {
  Matrix q(2, 2);
  q << 4.0, 0.0, 0.0, 0.25;
  const GaussianMeasure m(Vector::Zero(2), q);
  Vector x(2);
  x << 1.0, 0.5;
  const double expected = std::exp(-0.5 * (0.25 + 1.0)) / (2.0 * std::numbers::pi * 1.0);
  EXPECT_NEAR(m.density(x), expected, 1e-15);
  EXPECT_NEAR(m.precision()(1, 1), 4.0, 1e-14);
  EXPECT_TRUE(m.is_diagonal());
  const Matrix l = m.square_root();
  EXPECT_LT((l * l.transpose() - q).norm(), 1e-14);
}

TEST(GaussianMeasure, DegenerateCovarianceRejectedForDensity) {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1.0;
  const GaussianMeasure m(Vector::Zero(2), q);
  EXPECT_FALSE(m.is_positive_definite());
  EXPECT_THROW(m.density(Vector::Zero(2)), DegenerateMeasureError);
  EXPECT_THROW(m.precision(), DegenerateMeasureError);
}

TEST(Sampling, DeterministicAndMomentsMatch) {
  Matrix q(2, 2);
  q << 1.0, 0.8, 0.8, 2.0;
  const GaussianMeasure m(Vector::Zero(2), q);
  const Matrix s = sample_gaussian(m, 200000, 7);
  EXPECT_EQ(s, sample_gaussian(m, 200000, 7));
  EXPECT_NE(s, sample_gaussian(m, 200000, 8));
  const Matrix cov = s * s.transpose() / static_cast<double>(s.cols());
  EXPECT_NEAR(cov(0, 0), 1.0, 0.02);
  EXPECT_NEAR(cov(0, 1), 0.8, 0.02);
  EXPECT_NEAR(cov(1, 1), 2.0, 0.03);
}

TEST(CameronMartin, ShiftDensityIsNormalizedAndMatchesShiftedLaw) {
  Matrix q(2, 2);
  q << 2.0, 0.0, 0.0, 0.5;
  const GaussianMeasure m(Vector::Zero(2), q);
  Vector h(2);
  h << 1.0, -0.5;
  const CameronMartinShift shift(m, h);
  EXPECT_NEAR(shift.h_norm_sq(), 0.5 + 0.5, 1e-14);
  const auto gh = build_quadrature(2, QuadratureKind::gauss_hermite, 30);
  const auto dens = [&](auto x) { return shift.density(Vector::Map(x.data(), 2)); };
  EXPECT_NEAR(gh.expectation(dens, m), 1.0, 1e-10);
  // E[x_0 rho] is the mean of the shifted law.
  EXPECT_NEAR(gh.expectation([&](auto x) { return x[0] * dens(x); }, m), 1.0, 1e-10);
  EXPECT_NEAR(gh.expectation([&](auto x) { return x[1] * dens(x); }, m), -0.5, 1e-10);
}
