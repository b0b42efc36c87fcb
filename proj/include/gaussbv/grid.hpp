#pragma once

#include "gaussbv/gauss_core.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gaussbv {

/// Equispaced tensor grid on the box [-radius, radius]^dim, the same node
/// set on every axis. Flat index = i0 + n*i1 + n^2*i2 (axis 0 fastest).
class UniformGrid {
 public:
  UniformGrid(int dim, int nodes_per_axis, double radius = 6.0);

  int dim() const noexcept { return dim_; }
  int nodes_per_axis() const noexcept { return n_; }
  double radius() const noexcept { return radius_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  const std::vector<double>& axis_coordinates() const noexcept { return coords_; }
  double coordinate(int i) const noexcept { return coords_[i]; }
  int axis_index(std::size_t flat, int axis) const noexcept {
    return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(n_));
  }
  std::array<double, 3> point(std::size_t flat) const noexcept;

  /// Trapezoid (Lebesgue) weight of a node.
  double cell_weight(std::size_t flat) const noexcept;

  /// The grid as a uniform_truncated quadrature rule.
  QuadratureRule quadrature() const;

  /// Start offsets (axis index 0) of every grid line parallel to `axis`.
  std::vector<std::size_t> line_starts(int axis) const;

  friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.radius_ == b.radius_;
  }

 private:
  int dim_;
  int n_;
  double radius_;
  double h_;
  std::size_t size_ = 1;
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::vector<double> coords_;
  std::vector<double> axis_weights_;
};

/// A uniform grid paired with the Gaussian measure it carries. Caches the
/// per-node quadrature weights against the measure and the values of the
/// linear functionals h_hat_j(x) = (Q^{-1}(x - a))_j.
class GaussianGrid {
 public:
  static std::shared_ptr<const GaussianGrid> create(UniformGrid grid, GaussianMeasure measure);
  static std::shared_ptr<const GaussianGrid> standard(int dim, int nodes_per_axis,
                                                      double radius = 6.0);

  const UniformGrid& grid() const noexcept { return grid_; }
  const GaussianMeasure& measure() const noexcept { return measure_; }
  int dim() const noexcept { return grid_.dim(); }
  std::size_t size() const noexcept { return grid_.size(); }
  double spacing() const noexcept { return grid_.spacing(); }

  /// Node weights w_i with sum_i w_i f(x_i) ~ int f d(gamma).
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& h_hat(int axis) const noexcept { return h_hat_[axis]; }

  /// 1-D weights of axis j against the marginal N(a_j, Q_jj), normalized to
  /// sum to one. Only meaningful for diagonal covariance.
  const std::vector<double>& marginal_weights(int axis) const noexcept {
    return marginal_weights_[axis];
  }

  /// Throws UnsupportedError unless the covariance is diagonal.
  void require_diagonal(const char* operation) const;

 private:
  GaussianGrid(UniformGrid grid, GaussianMeasure measure);

  UniformGrid grid_;
  GaussianMeasure measure_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> h_hat_;
  std::vector<std::vector<double>> marginal_weights_;
};

using DomainPtr = std::shared_ptr<const GaussianGrid>;

/// Banded linear map R^n_in -> R^n_out acting on a single grid line:
/// out[i] = sum_k coef[i][k] * in[start[i] + k].
struct LineOperator {
  int n_in = 0;
  std::vector<int> start;
  std::vector<std::vector<double>> coef;

  int n_out() const noexcept { return static_cast<int>(start.size()); }

  /// Applies the operator to every line of `in` parallel to `axis`.
  void apply(const UniformGrid& grid, int axis, std::span<const double> in,
             std::span<double> out) const;
  /// Applies the transpose along `axis`.
  void apply_transpose(const UniformGrid& grid, int axis, std::span<const double> in,
                       std::span<double> out) const;
};

}  // namespace gaussbv
