#include "gaussbv/cylinder.hpp"
#include "gaussbv/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gaussbv;

TEST(ConditionalExpectation, IntegratesOutTrailingAxes) {
  auto d = GaussianGrid::standard(3, 33);
  const auto u = GridField::from_function(d, [](auto x) { return x[0] + x[1] * x[2] + x[2] * x[2]; });
  const auto e1 = conditional_expectation(u, 1);
  const auto e2 = conditional_expectation(u, 2);
  for (std::size_t i = 0; i < u.size(); i += 101) {
    const auto p = d->grid().point(i);
    EXPECT_NEAR(e1[i], p[0] + 1.0, 1e-3);
    EXPECT_NEAR(e2[i], p[0] + 1.0, 1e-3);
  }
  EXPECT_NEAR(conditional_expectation(u, 3)[500], u[500], 1e-14);
}

TEST(ConditionalExpectation, TowerProperty) {
  auto d = GaussianGrid::standard(3, 17);
  const auto u = GridField::from_function(d, [](auto x) { return std::sin(x[0] * x[1]) + std::cos(x[2]); });
  EXPECT_TRUE(tower_check(u, 1, 2).pass);
  EXPECT_TRUE(tower_check(u, 2, 3).pass);
}

TEST(ConditionalExpectation, InvalidProjection) {
  EXPECT_THROW(CylinderProjection(0, 2), DomainError);
  EXPECT_THROW(CylinderProjection(3, 2), DomainError);
}

TEST(Monotonicity, ConditioningDoesNotIncreaseVariation) {
  auto d = GaussianGrid::standard(2, 65);
  const auto u = GridField::from_function(d, [](auto x) { return std::cos(1.3 * x[0] - 0.7 * x[1]) + x[1]; });
  const auto c = monotonicity_check(u, 1, 0.1);
  EXPECT_TRUE(c.pass);
  EXPECT_LT(c.lhs, c.rhs);
}

TEST(Rotation, LawPreservedAndSeedDeterministic) {
  auto d = GaussianGrid::standard(1, 257);
  const auto u = GridField::from_function(d, [](auto x) { return x[0] * x[0]; });
  const auto a = rotation_invariance_check(u, 0.7, 20000, 3);
  const auto b = rotation_invariance_check(u, 0.7, 20000, 3);
  EXPECT_TRUE(a.pass);
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_NEAR(a.rhs, 1.0, 1e-6);
}
