#include "gaussbv/semigroup.hpp"

#include "gaussbv/diagnostics.hpp"
#include "gaussbv/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaussbv {

namespace {

// Kernel mass beyond |y| > kTail is below 1e-22 and is dropped.
constexpr double kTail = 10.0;

struct Moments {
  double m0, m1, m2;  // int_a^b y^k dphi(y), k = 0, 1, 2
};

Moments moments(double a, double b) {
  const double pa = normal_pdf(a);
  const double pb = normal_pdf(b);
  const double m0 = a >= 0.0 ? normal_sf(a) - normal_sf(b) : normal_cdf(b) - normal_cdf(a);
  const double m1 = pa - pb;
  const double m2 = m0 + a * pa - b * pb;
  return {m0, m1, m2};
}

// Appends linear-interpolation weights for the point z (constant extension).
void add_interpolation(const std::vector<double>& nodes, double z, double weight,
                       std::vector<double>& dense) {
  const int n = static_cast<int>(nodes.size());
  const double h = nodes[1] - nodes[0];
  const double s = std::clamp((z - nodes[0]) / h, 0.0, static_cast<double>(n - 1));
  const int k = std::min(static_cast<int>(s), n - 2);
  const double f = s - k;
  dense[k] += weight * (1.0 - f);
  dense[k + 1] += weight * f;
}

void compress_row(const std::vector<double>& dense, LineOperator& op, int row) {
  int lo = 0;
  int hi = static_cast<int>(dense.size()) - 1;
  while (lo < hi && dense[lo] == 0.0) ++lo;
  while (hi > lo && dense[hi] == 0.0) --hi;
  op.start[row] = lo;
  op.coef[row].assign(dense.begin() + lo, dense.begin() + hi + 1);
}

std::vector<double> apply_chain(const UniformGrid& grid, std::vector<double> values,
                                const std::vector<const LineOperator*>& per_axis) {
  std::vector<double> scratch(values.size());
  for (int axis = 0; axis < grid.dim(); ++axis) {
    if (per_axis[axis] == nullptr) continue;
    per_axis[axis]->apply(grid, axis, values, scratch);
    values.swap(scratch);
  }
  return values;
}

struct OuAxisMap {
  double alpha, shift, beta;
};

OuAxisMap ou_axis_map(const GaussianMeasure& m, int axis, double t) {
  const double alpha = std::exp(-t);
  const double a = m.mean()(axis);
  return {alpha, a * (1.0 - alpha), std::sqrt(-std::expm1(-2.0 * t)) * m.axis_sd(axis)};
}

void validate(const SemigroupParams& p) {
  if (!(p.t >= 0.0) || !std::isfinite(p.t)) {
    throw DomainError("semigroup: time must be finite and nonnegative");
  }
  if (p.integration == KernelIntegration::gauss_hermite && p.gh_level < 32) {
    throw DomainError("semigroup: Gauss-Hermite inner rule needs level >= 32");
  }
}

}  // namespace

LineOperator gaussian_kernel_operator(const std::vector<double>& nodes, double alpha,
                                      double shift, double beta, bool derivative,
                                      KernelIntegration integration, int gh_level) {
  const int n = static_cast<int>(nodes.size());
  if (n < 2) throw GridError("gaussian_kernel_operator: need at least two nodes");
  if (!(beta > 0.0)) {
    if (derivative) throw DomainError("gaussian_kernel_operator: derivative needs beta > 0");
  }
  const double h = nodes[1] - nodes[0];
  LineOperator op;
  op.n_in = n;
  op.start.resize(n);
  op.coef.resize(n);
  const double scale = derivative ? alpha / beta : 1.0;

  Rule1D gh;
  if (integration == KernelIntegration::gauss_hermite && beta > 0.0) gh = gauss_hermite_rule(gh_level);

  std::vector<double> dense(n);
  for (int i = 0; i < n; ++i) {
    std::fill(dense.begin(), dense.end(), 0.0);
    const double center = alpha * nodes[i] + shift;
    if (!(beta > 0.0)) {
      add_interpolation(nodes, center, 1.0, dense);
    } else if (integration == KernelIntegration::gauss_hermite) {
      for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
        const double w = gh.weights[k] * (derivative ? scale * gh.nodes[k] : 1.0);
        add_interpolation(nodes, center + beta * gh.nodes[k], w, dense);
      }
    } else {
      const double ratio = beta / h;
      auto y_of = [&](int k) { return (nodes[k] - center) / beta; };
      // Cells whose y-range meets [-kTail, kTail].
      const int k_lo = std::clamp(static_cast<int>(std::floor((center - kTail * beta - nodes[0]) / h)),
                                  0, n - 2);
      const int k_hi = std::clamp(static_cast<int>(std::ceil((center + kTail * beta - nodes[0]) / h)),
                                  0, n - 2);
      for (int k = k_lo; k <= k_hi; ++k) {
        const double a = y_of(k);
        const double b = y_of(k + 1);
        if (b < -kTail || a > kTail) continue;
        const Moments mo = moments(a, b);
        if (!derivative) {
          const double upper = ratio * (mo.m1 - a * mo.m0);
          dense[k] += mo.m0 - upper;
          dense[k + 1] += upper;
        } else {
          const double upper = ratio * (mo.m2 - a * mo.m1);
          dense[k] += scale * (mo.m1 - upper);
          dense[k + 1] += scale * upper;
        }
      }
      // Constant extension beyond the box.
      const double y_first = y_of(0);
      const double y_last = y_of(n - 1);
      if (y_first > -kTail) {
        dense[0] += derivative ? -scale * normal_pdf(y_first) : normal_cdf(y_first);
      }
      if (y_last < kTail) {
        dense[n - 1] += derivative ? scale * normal_pdf(y_last) : normal_sf(y_last);
      }
    }
    compress_row(dense, op, i);
  }
  return op;
}

LineOperator ou_line_operator(const GaussianGrid& space, int axis, const SemigroupParams& params,
                              bool derivative) {
  validate(params);
  space.require_diagonal("ou_line_operator");
  const auto map = ou_axis_map(space.measure(), axis, params.t);
  return gaussian_kernel_operator(space.grid().axis_coordinates(), map.alpha, map.shift, map.beta,
                                  derivative, params.integration, params.gh_level);
}

GridField ou_apply(const GridField& u, const SemigroupParams& params) {
  validate(params);
  if (params.t == 0.0) return u;
  const auto& space = u.space();
  space.require_diagonal("ou_apply");
  const auto& grid = space.grid();
  std::vector<LineOperator> ops;
  ops.reserve(grid.dim());
  for (int j = 0; j < grid.dim(); ++j) ops.push_back(ou_line_operator(space, j, params, false));
  std::vector<const LineOperator*> chain;
  for (const auto& op : ops) chain.push_back(&op);
  return GridField(u.domain(), apply_chain(grid, u.values(), chain));
}

GridField ou_apply(const GridField& u, double t) { return ou_apply(u, SemigroupParams{t}); }

HVectorField ou_gradient(const GridField& u, const SemigroupParams& params) {
  validate(params);
  const auto& space = u.space();
  if (params.t == 0.0) return gradient(u);
  space.require_diagonal("ou_gradient");
  const auto& grid = space.grid();
  const int d = grid.dim();
  std::vector<LineOperator> value_ops;
  std::vector<LineOperator> deriv_ops;
  for (int j = 0; j < d; ++j) {
    value_ops.push_back(ou_line_operator(space, j, params, false));
    deriv_ops.push_back(ou_line_operator(space, j, params, true));
  }
  std::vector<std::vector<double>> comps(d);
  for (int j = 0; j < d; ++j) {
    std::vector<const LineOperator*> chain(d);
    for (int k = 0; k < d; ++k) chain[k] = k == j ? &deriv_ops[k] : &value_ops[k];
    comps[j] = apply_chain(grid, u.values(), chain);
    const double q = space.measure().covariance()(j, j);
    if (q != 1.0) {
      for (double& v : comps[j]) v *= q;
    }
  }
  return HVectorField(u.domain(), std::move(comps));
}

HVectorField ou_gradient(const GridField& u, double t) { return ou_gradient(u, SemigroupParams{t}); }

GridField heat_apply(const GridField& u, double t, bool allow_zero) {
  if (!std::isfinite(t) || t < 0.0 || (t == 0.0 && !allow_zero)) {
    throw DomainError("heat_apply: time must be positive");
  }
  if (t == 0.0) return u;
  const auto& grid = u.grid();
  const double h = grid.spacing();
  if (t < h * h) {
    warn("heat_apply: t = " + std::to_string(t) + " is below the grid resolution h^2 = " +
         std::to_string(h * h) + "; returning the field unchanged");
    return u;
  }
  const LineOperator op =
      gaussian_kernel_operator(grid.axis_coordinates(), 1.0, 0.0, std::sqrt(t), false);
  std::vector<const LineOperator*> chain(grid.dim(), &op);
  return GridField(u.domain(), apply_chain(grid, u.values(), chain));
}

double commutation_residual(const GridField& u, double t, DifferenceScheme scheme) {
  if (!(t >= 0.0)) throw DomainError("commutation_residual: negative time");
  const HVectorField lhs = ou_gradient(u, t);
  const HVectorField grad = gradient(u, scheme);
  const double decay = std::exp(-t);
  std::vector<std::vector<double>> diff(u.grid().dim());
  for (int j = 0; j < u.grid().dim(); ++j) {
    const GridField smoothed = ou_apply(grad.component_field(j), t);
    diff[j].resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      diff[j][i] = lhs.component(j)[i] - decay * smoothed[i];
    }
  }
  return integrate_h_norm(HVectorField(u.domain(), std::move(diff)));
}

double ou_l1_constant(double t) {
  if (!(t >= 0.0)) throw DomainError("ou_l1_constant: negative time");
  if (t == 0.0) return 0.0;
  // s = r^2 turns the 1/sqrt(s) endpoint singularity into a bounded integrand.
  auto integrand = [](double r) {
    if (r == 0.0) return std::numbers::sqrt2;
    const double s = r * r;
    return 2.0 * r * std::exp(-s) / std::sqrt(-std::expm1(-2.0 * s));
  };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::sqrt(t), 15, 1e-14);
  return std::sqrt(2.0 / std::numbers::pi) * integral;
}

L1BoundCheck ou_l1_bound_check(const GridField& indicator, double t, double perimeter) {
  L1BoundCheck out;
  out.c_t = ou_l1_constant(t);
  out.perimeter = perimeter;
  if (t > 0.0) {
    const GridField smoothed = ou_apply(indicator, t);
    const auto& w = indicator.space().weights();
    double lhs = 0.0;
    for (std::size_t i = 0; i < indicator.size(); ++i) {
      lhs += w[i] * std::abs(smoothed[i] - indicator[i]);
    }
    out.lhs = lhs;
  }
  out.pass = out.lhs <= out.c_t * perimeter * 1.02;
  return out;
}

}  // namespace gaussbv
