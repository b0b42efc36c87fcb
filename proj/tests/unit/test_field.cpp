#include "gaussbv/csv_io.hpp"
#include "gaussbv/errors.hpp"
#include "gaussbv/field.hpp"
#include "gaussbv/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gaussbv;

namespace {

DomainPtr anisotropic2() {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 2.0;
  q(1, 1) = 0.5;
  return GaussianGrid::create(UniformGrid(2, 101, 8.0), GaussianMeasure(Vector::Zero(2), q));
}

GridField random_field(const DomainPtr& d, std::uint64_t seed) {
  auto eng = make_engine(seed, 0);
  std::normal_distribution<double> n;
  std::vector<double> v(d->size());
  for (double& x : v) x = n(eng);
  return GridField(d, v);
}

}  // namespace

TEST(UniformGrid, LayoutAndWeights) {
  const UniformGrid g(2, 5, 2.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_EQ(g.stride(1), 5u);
  const auto p = g.point(7);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], -1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += g.cell_weight(i);
  EXPECT_NEAR(sum, 16.0, 1e-14);
}

TEST(GridField, IntegratesMoments) {
  auto d = GaussianGrid::standard(2, 129);
  EXPECT_NEAR(integrate(GridField::constant(d, 1.0)), 1.0, 1e-8);
  EXPECT_NEAR(integrate(GridField::from_function(d, [](auto x) { return x[0] * x[0]; })), 1.0, 1e-6);
  EXPECT_NEAR(integrate(GridField::from_function(d, [](auto x) { return x[0] * x[1]; })), 0.0, 1e-12);
}

TEST(Gradient, LinearFunctionUnderAnisotropicCovariance) {
  auto d = anisotropic2();
  const auto u = GridField::from_function(d, [](auto x) { return 3.0 * x[0] - x[1]; });
  const auto g = gradient(u);
  // Q grad u = (6, -0.5) everywhere, |.|_H^2 = 36/2 + 0.25/0.5.
  for (std::size_t i = 0; i < u.size(); i += 37) {
    EXPECT_NEAR(g.component(0)[i], 6.0, 1e-11);
    EXPECT_NEAR(g.component(1)[i], -0.5, 1e-11);
  }
  EXPECT_NEAR(h_norms(g)[55], std::sqrt(18.5), 1e-11);
}

TEST(Gradient, FourthOrderSchemeExactOnQuartics) {
  auto d = GaussianGrid::standard(1, 41);
  const auto u = GridField::from_function(d, [](auto x) { return std::pow(x[0], 4) - x[0] * x[0]; });
  const auto du = partial_derivative(u, 0, DifferenceScheme::central4);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = d->grid().coordinate(static_cast<int>(i));
    EXPECT_NEAR(du[i], 4.0 * x * x * x - 2.0 * x, 1e-8 * (1.0 + std::abs(x * x * x)));
  }
}

TEST(Divergence, GaussianDivergenceOfConstantField) {
  // div_gamma e_1 = -<Q^{-1} x, e_1>.
  auto d = anisotropic2();
  HVectorField phi = HVectorField::zero(d);
  std::fill(phi.component(0).begin(), phi.component(0).end(), 1.0);
  const auto div = divergence_H(phi);
  for (std::size_t i = 0; i < div.size(); i += 53) {
    EXPECT_NEAR(div[i], -d->grid().point(i)[0] / 2.0, 1e-11);
  }
}

TEST(Divergence, DiscreteAdjointIdentity) {
  auto d = anisotropic2();
  const auto u = random_field(d, 1);
  HVectorField phi(d, {random_field(d, 2).values(), random_field(d, 3).values()});
  const auto div = discrete_divergence(phi);
  const auto g = gradient(u);
  const Matrix prec = d->measure().precision();
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = d->weights()[i];
    lhs += w * u[i] * div[i];
    double pair = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) pair += g.component(a)[i] * prec(a, b) * phi.component(b)[i];
    rhs -= w * pair;
  }
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(rhs));
}

TEST(Interpolate, ExactOnMultilinearAndConstantOutside) {
  auto d = GaussianGrid::standard(2, 33, 4.0);
  const auto u = GridField::from_function(d, [](auto x) { return 1.0 + x[0] - 2.0 * x[1] + x[0] * x[1]; });
  const double inside[2] = {0.123, -1.777};
  EXPECT_NEAR(interpolate(u, inside), 1.0 + 0.123 + 3.554 - 0.123 * 1.777, 1e-12);
  const double outside[2] = {9.0, 0.0};
  const double edge[2] = {4.0, 0.0};
  EXPECT_DOUBLE_EQ(interpolate(u, outside), interpolate(u, edge));
}

TEST(LlogL, HalfGaugeAgainstSimpson) {
  for (double t : {0.5, 3.0, 20.0}) {
    const int n = 20000;
    const double h = t / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double f = std::sqrt(std::log1p(k * h));
      s += f * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    EXPECT_NEAR(a_half(t), s * h / 3.0, 2e-6 * t) << t;
  }
  EXPECT_EQ(a_half(0.0), 0.0);
}

TEST(CsvIo, RoundTripIsBitExact) {
  auto d = GaussianGrid::standard(2, 17);
  const auto u = random_field(d, 5);
  std::stringstream ss;
  write_field_csv(ss, u);
  const auto v = read_field_csv(ss, GaussianMeasure::standard(2));
  ASSERT_EQ(v.size(), u.size());
  EXPECT_EQ(v.values(), u.values());
  EXPECT_EQ(v.grid(), u.grid());
}

TEST(CsvIo, RejectsIrregularNodes) {
  std::stringstream ss("x1,value\n-1,0\n0.3,1\n1,2\n");
  EXPECT_THROW(read_field_csv(ss, GaussianMeasure::standard(1)), GridError);
}
