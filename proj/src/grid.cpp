#include "gaussbv/grid.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/parallel.hpp"

#include <string>

namespace gaussbv {

UniformGrid::UniformGrid(int dim, int nodes_per_axis, double radius)
    : dim_(dim), n_(nodes_per_axis), radius_(radius) {
  if (dim < 1 || dim > kMaxGridDim) {
    throw UnsupportedError("UniformGrid: dimension " + std::to_string(dim) +
                           " unsupported (1..3)");
  }
  if (nodes_per_axis < 3) throw GridError("UniformGrid: need at least 3 nodes per axis");
  if (!(radius > 0.0)) throw GridError("UniformGrid: radius must be positive");
  const Rule1D rule = trapezoid_rule(n_, radius_);
  coords_ = rule.nodes;
  axis_weights_ = rule.weights;
  h_ = 2.0 * radius_ / (n_ - 1);
  for (int k = 0; k < dim_; ++k) {
    strides_[k] = size_;
    size_ *= static_cast<std::size_t>(n_);
  }
}

std::array<double, 3> UniformGrid::point(std::size_t flat) const noexcept {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) p[k] = coords_[axis_index(flat, k)];
  return p;
}

double UniformGrid::cell_weight(std::size_t flat) const noexcept {
  double w = 1.0;
  for (int k = 0; k < dim_; ++k) w *= axis_weights_[axis_index(flat, k)];
  return w;
}

QuadratureRule UniformGrid::quadrature() const {
  return build_quadrature(dim_, QuadratureKind::uniform_truncated, n_, radius_);
}

std::vector<std::size_t> UniformGrid::line_starts(int axis) const {
  std::vector<std::size_t> starts;
  starts.reserve(size_ / n_);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    if (axis_index(flat, axis) == 0) starts.push_back(flat);
  }
  return starts;
}

GaussianGrid::GaussianGrid(UniformGrid grid, GaussianMeasure measure)
    : grid_(std::move(grid)), measure_(std::move(measure)) {
  if (grid_.dim() != measure_.dim()) {
    throw GridError("GaussianGrid: grid and measure dimensions differ");
  }
  const Matrix& precision = measure_.precision();  // throws when degenerate
  const int d = grid_.dim();
  weights_.resize(grid_.size());
  h_hat_.assign(d, std::vector<double>(grid_.size()));
  Vector x(d);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const auto p = grid_.point(i);
    for (int k = 0; k < d; ++k) x(k) = p[k];
    weights_[i] = grid_.cell_weight(i) * measure_.density(x);
    const Vector dual = precision * (x - measure_.mean());
    for (int k = 0; k < d; ++k) h_hat_[k][i] = dual(k);
  }

  const int n = grid_.nodes_per_axis();
  const Rule1D axis = trapezoid_rule(n, grid_.radius());
  marginal_weights_.assign(d, std::vector<double>(n));
  for (int k = 0; k < d; ++k) {
    const double mean = measure_.mean()(k);
    const double sd = measure_.axis_sd(k);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      marginal_weights_[k][i] = axis.weights[i] * normal_pdf((axis.nodes[i] - mean) / sd) / sd;
      total += marginal_weights_[k][i];
    }
    for (double& w : marginal_weights_[k]) w /= total;
  }
}

std::shared_ptr<const GaussianGrid> GaussianGrid::create(UniformGrid grid,
                                                         GaussianMeasure measure) {
  return std::shared_ptr<const GaussianGrid>(
      new GaussianGrid(std::move(grid), std::move(measure)));
}

std::shared_ptr<const GaussianGrid> GaussianGrid::standard(int dim, int nodes_per_axis,
                                                           double radius) {
  return create(UniformGrid(dim, nodes_per_axis, radius), GaussianMeasure::standard(dim));
}

void GaussianGrid::require_diagonal(const char* operation) const {
  if (!measure_.is_diagonal()) {
    throw UnsupportedError(std::string(operation) +
                           ": non-diagonal covariance; whiten the coordinates first");
  }
}

void LineOperator::apply(const UniformGrid& grid, int axis, std::span<const double> in,
                         std::span<double> out) const {
  if (n_in != grid.nodes_per_axis() || n_out() != grid.nodes_per_axis()) {
    throw GridError("LineOperator: operator size does not match the grid");
  }
  const auto starts = grid.line_starts(axis);
  const std::size_t stride = grid.stride(axis);
  const auto lines = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (std::ptrdiff_t l = 0; l < lines; ++l) {
    const std::size_t base = starts[l];
    for (int i = 0; i < n_out(); ++i) {
      const auto& c = coef[i];
      const double* src = in.data() + base + static_cast<std::size_t>(start[i]) * stride;
      double acc = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * src[k * stride];
      out[base + static_cast<std::size_t>(i) * stride] = acc;
    }
  }
}

void LineOperator::apply_transpose(const UniformGrid& grid, int axis, std::span<const double> in,
                                   std::span<double> out) const {
  if (n_in != grid.nodes_per_axis() || n_out() != grid.nodes_per_axis()) {
    throw GridError("LineOperator: operator size does not match the grid");
  }
  const auto starts = grid.line_starts(axis);
  const std::size_t stride = grid.stride(axis);
  const auto lines = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (std::ptrdiff_t l = 0; l < lines; ++l) {
    const std::size_t base = starts[l];
    for (int j = 0; j < n_in; ++j) out[base + static_cast<std::size_t>(j) * stride] = 0.0;
    for (int i = 0; i < n_out(); ++i) {
      const auto& c = coef[i];
      const double v = in[base + static_cast<std::size_t>(i) * stride];
      double* dst = out.data() + base + static_cast<std::size_t>(start[i]) * stride;
      for (std::size_t k = 0; k < c.size(); ++k) dst[k * stride] += c[k] * v;
    }
  }
}

}  // namespace gaussbv
