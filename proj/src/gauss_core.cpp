#include "gaussbv/gauss_core.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace gaussbv {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Acklam's rational approximation to the normal quantile, lower half only
// (p <= 0.5). Relative error ~1e-9; used as the Newton starting point.
double quantile_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solves Phi(x) = p for p in (0, 0.5] by Newton, safeguarded by bisection on
// a bracket that always contains the root.
double lower_quantile(double p) {
  double lo = -40.0;
  double hi = 0.0;
  double x = std::clamp(quantile_guess(p), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = normal_cdf(x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double pdf = normal_pdf(x);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace

GaussianMeasure::GaussianMeasure(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto d = mean_.size();
  if (d < 1) throw DomainError("GaussianMeasure: dimension must be positive");
  if (covariance_.rows() != d || covariance_.cols() != d) {
    throw DomainError("GaussianMeasure: covariance must be " + std::to_string(d) + "x" +
                      std::to_string(d));
  }
  if (!mean_.allFinite() || !covariance_.allFinite()) {
    throw DomainError("GaussianMeasure: non-finite parameters");
  }
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("GaussianMeasure: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance_);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-12 * scale) {
    throw DomainError("GaussianMeasure: covariance is not positive semidefinite");
  }

  Eigen::LLT<Matrix> llt(covariance_);
  positive_definite_ = llt.info() == Eigen::Success && min_eig > 1e-14 * scale;
  if (positive_definite_) {
    sqrt_ = llt.matrixL();
    precision_ = llt.solve(Matrix::Identity(d, d));
    log_det_ = 2.0 * sqrt_.diagonal().array().log().sum();
  } else {
    sqrt_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  diagonal_ = true;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && covariance_(i, j) != 0.0) diagonal_ = false;
    }
  }
  standard_ = diagonal_ && mean_.isZero(0.0) && covariance_.isIdentity(0.0);
}

GaussianMeasure GaussianMeasure::standard(int dim) {
  return GaussianMeasure(Vector::Zero(dim), Matrix::Identity(dim, dim));
}

const Matrix& GaussianMeasure::precision() const {
  if (!positive_definite_) {
    throw DegenerateMeasureError("covariance is singular: measure is degenerate");
  }
  return precision_;
}

double GaussianMeasure::log_det() const {
  if (!positive_definite_) {
    throw DegenerateMeasureError("covariance is singular: measure is degenerate");
  }
  return log_det_;
}

double GaussianMeasure::density(const Vector& x) const {
  if (!positive_definite_) {
    throw DegenerateMeasureError("covariance is singular: measure has no density");
  }
  const Vector r = x - mean_;
  const double quad = r.dot(precision_ * r);
  return std::exp(-0.5 * (dim() * std::log(2.0 * std::numbers::pi) + log_det_ + quad));
}

double gaussian_density(const GaussianMeasure& m, const Vector& x) { return m.density(x); }

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double t) noexcept { return 0.5 * std::erfc(-t / kSqrt2); }

double normal_sf(double t) noexcept { return 0.5 * std::erfc(t / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: argument must lie in (0,1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return lower_quantile(p);
  return -lower_quantile(1.0 - p);
}

double isoperimetric_profile(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("isoperimetric_profile: argument must lie in [0,1]");
  }
  // Evaluate on the lower half so that U(t) == U(1-t) up to the rounding of 1-t.
  const double s = std::min(t, 1.0 - t);
  if (s <= 0.0) return 0.0;
  return normal_pdf(normal_quantile(s));
}

Rule1D gauss_hermite_rule(int n) {
  if (n < 1) throw DomainError("gauss_hermite_rule: need at least one node");
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi, Eigen::EigenvaluesOnly);
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  // Orthonormal probabilists' Hermite values p_0..p_{n}; p_n' = sqrt(n) p_{n-1}.
  auto evaluate = [n](double x, double& pn, double& pn1, double& sumsq) {
    double prev = 0.0;
    double cur = 1.0;
    sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
      sumsq += cur * cur;
      const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                          std::sqrt(static_cast<double>(k + 1));
      prev = cur;
      cur = next;
    }
    pn = cur;
    pn1 = prev;
  };

  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()(i);
    double pn = 0.0, pn1 = 0.0, sumsq = 0.0;
    for (int it = 0; it < 8; ++it) {
      evaluate(x, pn, pn1, sumsq);
      const double deriv = std::sqrt(static_cast<double>(n)) * pn1;
      if (deriv == 0.0) break;
      const double step = pn / deriv;
      x -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
    }
    evaluate(x, pn, pn1, sumsq);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sumsq;
  }
  // Symmetrize: the rule is exactly symmetric in exact arithmetic.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule1D trapezoid_rule(int n, double radius) {
  if (n < 2) throw DomainError("trapezoid_rule: need at least two nodes");
  if (!(radius > 0.0)) throw DomainError("trapezoid_rule: radius must be positive");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 2.0 * radius / (n - 1));
  for (int i = 0; i < n; ++i) rule.nodes[i] = -radius + 2.0 * radius * i / (n - 1);
  rule.nodes[n - 1] = radius;
  rule.weights.front() *= 0.5;
  rule.weights.back() *= 0.5;
  return rule;
}

QuadratureRule build_quadrature(int dim, QuadratureKind kind, int level, double box_radius) {
  if (dim < 1 || dim > kMaxGridDim) {
    throw UnsupportedError("build_quadrature: dimension " + std::to_string(dim) +
                           " unsupported (1..3)");
  }
  if (level < 8) throw DomainError("build_quadrature: level must be >= 8");

  QuadratureRule rule;
  rule.dim = dim;
  rule.kind = kind;
  rule.level = level;
  rule.box_radius = kind == QuadratureKind::uniform_truncated ? box_radius : 0.0;
  rule.axis_rule = kind == QuadratureKind::gauss_hermite ? gauss_hermite_rule(level)
                                                         : trapezoid_rule(level, box_radius);

  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= static_cast<std::size_t>(level);
  rule.nodes.resize(total * dim);
  rule.weights.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      const std::size_t i = rest % level;
      rest /= level;
      rule.nodes[flat * dim + k] = rule.axis_rule.nodes[i];
      w *= rule.axis_rule.weights[i];
    }
    rule.weights[flat] = w;
  }
  return rule;
}

double QuadratureRule::expectation(const std::function<double(std::span<const double>)>& f,
                                   const GaussianMeasure& m) const {
  if (m.dim() != dim) throw DomainError("QuadratureRule: measure dimension mismatch");
  double sum = 0.0;
  Vector x(dim);
  if (kind == QuadratureKind::gauss_hermite) {
    Vector z(dim);
    for (std::size_t i = 0; i < size(); ++i) {
      for (int k = 0; k < dim; ++k) z(k) = nodes[i * dim + k];
      x = m.mean() + m.square_root() * z;
      sum += weights[i] * f(std::span<const double>(x.data(), dim));
    }
  } else {
    for (std::size_t i = 0; i < size(); ++i) {
      for (int k = 0; k < dim; ++k) x(k) = nodes[i * dim + k];
      sum += weights[i] * m.density(x) * f(std::span<const double>(x.data(), dim));
    }
  }
  return sum;
}

Matrix sample_gaussian(const GaussianMeasure& m, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_gaussian: n must be >= 1");
  auto engine = make_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = m.dim();
  Matrix z(d, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (int k = 0; k < d; ++k) z(k, j) = normal(engine);
  }
  Matrix out = m.square_root() * z;
  out.colwise() += m.mean();
  return out;
}

CameronMartinShift::CameronMartinShift(const GaussianMeasure& m, Vector h)
    : mean_(m.mean()), h_(std::move(h)) {
  if (h_.size() != m.dim()) throw DomainError("CameronMartinShift: dimension mismatch");
  dual_ = m.precision() * h_;
  h_norm_sq_ = std::max(0.0, h_.dot(dual_));
}

double CameronMartinShift::h_hat(const Vector& x) const { return (x - mean_).dot(dual_); }

double CameronMartinShift::density(const Vector& x) const {
  if (h_norm_sq_ == 0.0) return 1.0;
  return std::exp(h_hat(x) - 0.5 * h_norm_sq_);
}

double cameron_martin_density(const CameronMartinShift& shift, const Vector& x) {
  return shift.density(x);
}

}  // namespace gaussbv
