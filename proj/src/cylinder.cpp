#include "gaussbv/cylinder.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/rng.hpp"
#include "gaussbv/semigroup.hpp"

#include <cmath>
#include <random>

namespace gaussbv {

CylinderProjection::CylinderProjection(int retained, int dim) : m(retained), total_dim(dim) {
  if (dim < 1 || retained < 1 || retained > dim) {
    throw DomainError("CylinderProjection: need 1 <= m <= d");
  }
}

GridField conditional_expectation(const GridField& u, const CylinderProjection& p) {
  const auto& space = u.space();
  const auto& grid = space.grid();
  if (p.total_dim != grid.dim()) throw DomainError("conditional_expectation: dimension mismatch");
  space.require_diagonal("conditional_expectation");
  std::vector<double> v = u.values();
  const int n = grid.nodes_per_axis();
  for (int axis = p.m; axis < grid.dim(); ++axis) {
    const auto& mw = space.marginal_weights(axis);
    const std::size_t stride = grid.stride(axis);
    for (std::size_t start : grid.line_starts(axis)) {
      double mean = 0.0;
      for (int k = 0; k < n; ++k) mean += mw[k] * v[start + k * stride];
      for (int k = 0; k < n; ++k) v[start + k * stride] = mean;
    }
  }
  return GridField(u.domain(), std::move(v));
}

GridField conditional_expectation(const GridField& u, int m) {
  return conditional_expectation(u, CylinderProjection(m, u.grid().dim()));
}

TowerCheck tower_check(const GridField& u, int m, int n) {
  if (m > n) throw DomainError("tower_check: need m <= n");
  const GridField inner = conditional_expectation(conditional_expectation(u, n), m);
  const GridField direct = conditional_expectation(u, m);
  TowerCheck out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(inner[i] - direct[i]));
  }
  out.pass = out.residual <= 1e-8;
  return out;
}

MonotonicityCheck monotonicity_check(const GridField& u, int m, double t) {
  if (!(t > 0.0)) throw DomainError("monotonicity_check: t must be positive");
  MonotonicityCheck out;
  out.lhs = integrate_h_norm(ou_gradient(conditional_expectation(u, m), t));
  out.rhs = integrate_h_norm(ou_gradient(u, t));
  out.pass = out.lhs <= out.rhs * 1.01;
  return out;
}

RotationCheck rotation_invariance_check(const GridField& u, double theta, std::size_t n_mc,
                                        std::uint64_t seed) {
  if (n_mc < 2) throw DomainError("rotation_invariance_check: need at least two samples");
  const auto& m = u.space().measure();
  if (m.mean().cwiseAbs().maxCoeff() != 0.0) {
    throw DomainError("rotation_invariance_check: measure must be centered");
  }
  const int d = m.dim();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Matrix& l = m.square_root();

  // Fixed-size blocks with their own streams keep the result independent of
  // the worker count.
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n_mc + kBlock - 1) / kBlock;
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> sq(blocks, 0.0);
#pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(blocks); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    auto engine = make_engine(seed, b);
    std::normal_distribution<double> normal;
    Vector x(d), y(d), z(d);
    std::vector<double> point(d);
    const std::size_t end = std::min(n_mc, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) {
      for (int j = 0; j < d; ++j) x(j) = normal(engine);
      for (int j = 0; j < d; ++j) y(j) = normal(engine);
      z = l * (c * x + s * y);
      for (int j = 0; j < d; ++j) point[j] = z(j);
      const double v = interpolate(u, point);
      sums[b] += v;
      sq[b] += v * v;
    }
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += sums[b];
    sum_sq += sq[b];
  }
  const double n = static_cast<double>(n_mc);
  RotationCheck out;
  out.lhs = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.lhs * out.lhs) / (n - 1.0));
  out.std_error = std::sqrt(var / n);
  out.rhs = integrate(u);
  out.pass = std::abs(out.lhs - out.rhs) < 4.0 * out.std_error ||
             std::abs(out.lhs - out.rhs) <= 1e-12 * std::max(1.0, std::abs(out.rhs));
  return out;
}

}  // namespace gaussbv
