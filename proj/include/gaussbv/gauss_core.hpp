#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gaussbv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
inline constexpr int kMaxGridDim = 3;

/// Gaussian measure N(mean, covariance) on R^d.
///
/// The covariance must be symmetric positive semidefinite. Operations that
/// need a density (or the precision matrix) additionally require it to be
/// positive definite and throw DegenerateMeasureError otherwise.
class GaussianMeasure {
 public:
  GaussianMeasure(Vector mean, Matrix covariance);

  static GaussianMeasure standard(int dim);

  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return covariance_; }

  bool is_positive_definite() const noexcept { return positive_definite_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  bool is_standard() const noexcept { return standard_; }

  /// Q^{-1}.
  const Matrix& precision() const;
  /// A matrix L with L L^T = Q (Cholesky when Q is positive definite).
  const Matrix& square_root() const noexcept { return sqrt_; }
  double log_det() const;

  double density(const Vector& x) const;

  /// Standard deviation along axis j (sqrt of the diagonal entry).
  double axis_sd(int j) const { return std::sqrt(covariance_(j, j)); }

  friend bool operator==(const GaussianMeasure& a, const GaussianMeasure& b) {
    return a.mean_ == b.mean_ && a.covariance_ == b.covariance_;
  }

 private:
  Vector mean_;
  Matrix covariance_;
  Matrix sqrt_;
  Matrix precision_;
  double log_det_ = 0.0;
  bool positive_definite_ = false;
  bool diagonal_ = false;
  bool standard_ = false;
};

double gaussian_density(const GaussianMeasure& m, const Vector& x);

// One-dimensional standard normal helpers.
double normal_pdf(double x) noexcept;
/// Phi(t), computed from erfc so both tails keep full relative accuracy.
double normal_cdf(double t) noexcept;
/// 1 - Phi(t) without cancellation.
double normal_sf(double t) noexcept;
/// Phi^{-1}(p) for p in (0,1); throws DomainError at 0, 1 or outside.
double normal_quantile(double p);

/// Gaussian isoperimetric profile U(t) = Phi'(Phi^{-1}(t)): the perimeter of
/// a halfspace of measure t. U(0) = U(1) = 0.
double isoperimetric_profile(double t);

enum class QuadratureKind { uniform_truncated, gauss_hermite };

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the standard normal weight (weights sum
/// to 1). Nodes from the Jacobi matrix, then polished by Newton on the
/// orthonormal Hermite recurrence.
Rule1D gauss_hermite_rule(int n);

/// n equispaced nodes on [-radius, radius] with trapezoid (Lebesgue) weights.
Rule1D trapezoid_rule(int n, double radius);

/// Tensor-product quadrature rule on R^d, d <= 3.
///
/// For gauss_hermite the weights integrate against the standard Gaussian.
/// For uniform_truncated they are Lebesgue weights on the box, so they sum
/// to (2 radius)^d, and expectation() multiplies by the density.
struct QuadratureRule {
  int dim = 0;
  QuadratureKind kind = QuadratureKind::gauss_hermite;
  int level = 0;
  double box_radius = 0.0;
  Rule1D axis_rule;
  std::vector<double> nodes;    // size() * dim, point-major
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  /// Integral of f against the measure m. For Gauss-Hermite nodes are mapped
  /// through x = mean + L z.
  double expectation(const std::function<double(std::span<const double>)>& f,
                     const GaussianMeasure& m) const;
};

QuadratureRule build_quadrature(int dim, QuadratureKind kind, int level, double box_radius = 6.0);

/// n samples from m, returned as the columns of a dim x n matrix.
/// Deterministic in seed.
Matrix sample_gaussian(const GaussianMeasure& m, std::size_t n, std::uint64_t seed);

/// A Cameron-Martin direction h in the truncated setting, where H is R^d
/// with |h|_H = |Q^{-1/2} h|.
class CameronMartinShift {
 public:
  CameronMartinShift(const GaussianMeasure& m, Vector h);

  const Vector& h() const noexcept { return h_; }
  double h_norm_sq() const noexcept { return h_norm_sq_; }
  /// The linear functional x -> <x - mean, Q^{-1} h>.
  double h_hat(const Vector& x) const;
  /// exp(h_hat(x) - |h|_H^2 / 2): density of the law of x + h w.r.t. m.
  double density(const Vector& x) const;

 private:
  Vector mean_;
  Vector h_;
  Vector dual_;  // Q^{-1} h
  double h_norm_sq_ = 0.0;
};

double cameron_martin_density(const CameronMartinShift& shift, const Vector& x);

}  // namespace gaussbv
