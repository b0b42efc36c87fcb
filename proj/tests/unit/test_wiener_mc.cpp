#include "gaussbv/errors.hpp"
#include "gaussbv/wiener_mc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gaussbv;

TEST(Paths, ReproducibleFromSeedAndIndex) {
  const auto e = sample_brownian(50, 64, 0.0, 11);
  EXPECT_EQ(e.path(17), e.path(17));
  EXPECT_EQ(e.path(17), sample_brownian(500, 64, 0.0, 11).path(17));
  EXPECT_NE(e.path(17), sample_brownian(50, 64, 0.0, 12).path(17));
  EXPECT_EQ(e.path(3).size(), 65u);
  EXPECT_EQ(e.path(3).front(), 0.0);
}

TEST(Paths, BrownianMarginal) {
  const auto e = sample_brownian(40000, 16, 1.0, 1);
  const auto s = sample_stats(e.marginal(0.5));
  EXPECT_NEAR(s.mean, 1.0, 4.0 * s.std_error);
  EXPECT_NEAR(s.variance, 0.5, 4.0 * s.variance_std_error);
}

TEST(Paths, BridgeMarginalAndEndpoint) {
  const auto e = sample_pinned(40000, 16, 0.0, 2.0, 2);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(e.path(i).back(), 2.0);
  const auto s = sample_stats(e.marginal(0.25));
  EXPECT_NEAR(s.mean, 0.5, 4.0 * s.std_error);
  EXPECT_NEAR(s.variance, 0.25 * 0.75, 4.0 * s.variance_std_error);
}

TEST(Paths, OrnsteinUhlenbeckMoments) {
  const auto e = ou_process(40000, 8, 1.5, 3);
  const auto s = sample_stats(e.marginal(1.0));
  EXPECT_NEAR(s.mean, 1.5 * std::exp(-0.5), 4.0 * s.std_error);
  EXPECT_NEAR(s.variance, 1.0 - std::exp(-1.0), 4.0 * s.variance_std_error);
}

TEST(RunningMax, ReflectionPrinciple) {
  // E M_1 = sqrt(2/pi), P(M_1 > 1) = 2 (1 - Phi(1)).
  const auto e = sample_brownian(40000, 256, 0.0, 4);
  const auto r = running_max_stats(e);
  EXPECT_NEAR(r.corrected.mean, std::sqrt(2.0 / std::numbers::pi), 4.0 * r.corrected.std_error);
  EXPECT_NEAR(r.exceed_one, std::erfc(1.0 / std::sqrt(2.0)), 4.0 * r.exceed_one_std_error);
  EXPECT_LT(r.uncorrected.mean, r.corrected.mean);
  EXPECT_GE(r.min_max, 0.0);
  EXPECT_THROW(running_max_stats(sample_brownian(10, 8, 1.0, 0)), DomainError);
}

TEST(Stats, PairwiseSumAndMoments) {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(x.data(), x.size()), 500500.0);
  const auto s = sample_stats({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
}

TEST(Geometry, SignedDistances) {
  const auto iv = DomainGeometry::interval(-1.0, 1.0);
  Vector x(1);
  x << 0.25;
  EXPECT_DOUBLE_EQ(iv.q(x), 0.75);
  x << 3.0;
  EXPECT_DOUBLE_EQ(iv.q(x), -2.0);
  Vector c = Vector::Zero(2);
  const auto disk = DomainGeometry::disk(c, 2.0);
  Vector y(2);
  y << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(disk.q(y), -3.0);
  EXPECT_LE(disk.lipschitz_excess(4.0, 1000, 1), 1e-12);
  EXPECT_THROW(DomainGeometry::custom(1, [](const Vector& v) { return 1.0 - 2.0 * std::abs(v(0)); }, 0.5),
               DomainError);
}

TEST(HinoUchida, FunctionalBoundedByDepthAndEstimatorFinite) {
  const auto iv = DomainGeometry::interval(-1.0, 1.0);
  const auto e = sample_pinned(2000, 128, 0.0, 0.0, 5);
  const auto f = hino_uchida_functional(iv, e);
  ASSERT_EQ(f.size(), 2000u);
  for (double v : f) EXPECT_LE(v, 1.0);
  HinoUchidaParams p;
  p.n_paths = 4000;
  p.n_steps = 256;
  p.a = Vector::Zero(1);
  p.b = Vector::Zero(1);
  p.seed = 5;
  const auto pts = hino_uchida_estimator(iv, {4, 8}, p);
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& q : pts) {
    EXPECT_GT(q.bound, 0.0);
    EXPECT_LT(q.bound, 5.0);
  }
}

TEST(Csv, EnsembleHeaderAndRows) {
  const auto e = sample_brownian(3, 4, 0.0, 1);
  std::ostringstream out;
  write_ensemble_csv(out, e, 2);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "path_id,t,value");
  EXPECT_EQ(static_cast<int>(std::count(s.begin(), s.end(), '\n')), 1 + 2 * 5);
}
