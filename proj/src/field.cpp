#include "gaussbv/field.hpp"

#include "gaussbv/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaussbv {

namespace {

void require_same_domain(const DomainPtr& a, const DomainPtr& b, const char* what) {
  if (a != b && !(a->grid() == b->grid() && a->measure() == b->measure())) {
    throw GridError(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace

GridField::GridField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw GridError("GridField: null domain");
  if (values_.size() != domain_->size()) {
    throw GridError("GridField: value count does not match the grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("GridField: non-finite value");
  }
}

GridField GridField::from_function(DomainPtr domain, const ScalarFunction& f) {
  std::vector<double> values(domain->size());
  const int d = domain->dim();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto p = domain->grid().point(i);
    values[i] = f(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
  }
  return GridField(std::move(domain), std::move(values));
}

GridField GridField::constant(DomainPtr domain, double c) {
  std::vector<double> values(domain->size(), c);
  return GridField(std::move(domain), std::move(values));
}

GridField GridField::plus(double c) const {
  auto v = values_;
  for (double& x : v) x += c;
  return GridField(domain_, std::move(v));
}

GridField GridField::scaled(double c) const {
  auto v = values_;
  for (double& x : v) x *= c;
  return GridField(domain_, std::move(v));
}

GridField GridField::minus(const GridField& other) const {
  require_same_domain(domain_, other.domain_, "GridField::minus");
  auto v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
  return GridField(domain_, std::move(v));
}

HVectorField::HVectorField(DomainPtr domain, std::vector<std::vector<double>> components)
    : domain_(std::move(domain)), components_(std::move(components)) {
  if (!domain_) throw GridError("HVectorField: null domain");
  if (static_cast<int>(components_.size()) != domain_->dim()) {
    throw GridError("HVectorField: need one component per axis");
  }
  for (const auto& c : components_) {
    if (c.size() != domain_->size()) throw GridError("HVectorField: component size mismatch");
  }
}

HVectorField HVectorField::zero(DomainPtr domain) {
  const int d = domain->dim();
  const std::size_t n = domain->size();
  return HVectorField(std::move(domain), std::vector<std::vector<double>>(d, std::vector<double>(n)));
}

double HMeasureDecomposition::singular_mass() const {
  double total = 0.0;
  for (const auto& atom : singular) total += atom.mass;
  return total;
}

LineOperator derivative_operator(int n, double h, DifferenceScheme scheme) {
  LineOperator op;
  op.n_in = n;
  op.start.resize(n);
  op.coef.resize(n);
  if (scheme == DifferenceScheme::central2) {
    if (n < 3) throw GridError("derivative_operator: need at least 3 nodes");
    const double s = 1.0 / (2.0 * h);
    op.start[0] = 0;
    op.coef[0] = {-3.0 * s, 4.0 * s, -1.0 * s};
    for (int i = 1; i < n - 1; ++i) {
      op.start[i] = i - 1;
      op.coef[i] = {-s, 0.0, s};
    }
    op.start[n - 1] = n - 3;
    op.coef[n - 1] = {1.0 * s, -4.0 * s, 3.0 * s};
    return op;
  }
  if (n < 5) throw GridError("derivative_operator: 4th-order scheme needs at least 5 nodes");
  const double s = 1.0 / (12.0 * h);
  op.start[0] = 0;
  op.coef[0] = {-25.0 * s, 48.0 * s, -36.0 * s, 16.0 * s, -3.0 * s};
  op.start[1] = 0;
  op.coef[1] = {-3.0 * s, -10.0 * s, 18.0 * s, -6.0 * s, 1.0 * s};
  for (int i = 2; i < n - 2; ++i) {
    op.start[i] = i - 2;
    op.coef[i] = {s, -8.0 * s, 0.0, 8.0 * s, -s};
  }
  op.start[n - 2] = n - 5;
  op.coef[n - 2] = {-1.0 * s, 6.0 * s, -18.0 * s, 10.0 * s, 3.0 * s};
  op.start[n - 1] = n - 5;
  op.coef[n - 1] = {3.0 * s, -16.0 * s, 36.0 * s, -48.0 * s, 25.0 * s};
  return op;
}

std::vector<double> partial_derivative(const GridField& u, int axis, DifferenceScheme scheme) {
  const auto& grid = u.grid();
  if (axis < 0 || axis >= grid.dim()) throw DomainError("partial_derivative: axis out of range");
  const LineOperator op = derivative_operator(grid.nodes_per_axis(), grid.spacing(), scheme);
  std::vector<double> out(u.size());
  op.apply(grid, axis, u.values(), out);
  return out;
}

HVectorField gradient(const GridField& u, DifferenceScheme scheme) {
  const int d = u.grid().dim();
  std::vector<std::vector<double>> partials(d);
  for (int j = 0; j < d; ++j) partials[j] = partial_derivative(u, j, scheme);
  const auto& m = u.space().measure();
  if (m.is_diagonal()) {
    for (int j = 0; j < d; ++j) {
      const double q = m.covariance()(j, j);
      if (q != 1.0) {
        for (double& v : partials[j]) v *= q;
      }
    }
    return HVectorField(u.domain(), std::move(partials));
  }
  std::vector<std::vector<double>> comps(d, std::vector<double>(u.size()));
  const Matrix& q = m.covariance();
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      double acc = 0.0;
      for (int b = 0; b < d; ++b) acc += q(a, b) * partials[b][i];
      comps[a][i] = acc;
    }
  }
  return HVectorField(u.domain(), std::move(comps));
}

GridField adjoint_derivative(const GridField& phi, int axis, DifferenceScheme scheme) {
  auto values = partial_derivative(phi, axis, scheme);
  const auto& hhat = phi.space().h_hat(axis);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= phi[i] * hhat[i];
  return GridField(phi.domain(), std::move(values));
}

GridField divergence_H(const HVectorField& phi, DifferenceScheme scheme) {
  std::vector<double> total(phi.size(), 0.0);
  for (int j = 0; j < phi.dim(); ++j) {
    const GridField term = adjoint_derivative(phi.component_field(j), j, scheme);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += term[i];
  }
  return GridField(phi.domain(), std::move(total));
}

GridField discrete_divergence(const HVectorField& phi) {
  const auto& space = *phi.domain();
  const auto& grid = space.grid();
  const auto& w = space.weights();
  const LineOperator op =
      derivative_operator(grid.nodes_per_axis(), grid.spacing(), DifferenceScheme::central2);
  std::vector<double> total(phi.size(), 0.0);
  std::vector<double> weighted(phi.size());
  std::vector<double> back(phi.size());
  for (int j = 0; j < phi.dim(); ++j) {
    const auto& c = phi.component(j);
    for (std::size_t i = 0; i < c.size(); ++i) weighted[i] = w[i] * c[i];
    op.apply_transpose(grid, j, weighted, back);
    for (std::size_t i = 0; i < c.size(); ++i) total[i] -= back[i];
  }
  for (std::size_t i = 0; i < total.size(); ++i) total[i] /= w[i];
  return GridField(phi.domain(), std::move(total));
}

double integrate(const GridField& u) {
  const auto& w = u.space().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * u[i];
  return sum;
}

std::vector<double> h_norms(const HVectorField& v) {
  const auto& m = v.domain()->measure();
  const int d = v.dim();
  std::vector<double> out(v.size());
  if (m.is_diagonal()) {
    std::vector<double> inv(d);
    for (int j = 0; j < d; ++j) inv[j] = 1.0 / m.covariance()(j, j);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += v.component(j)[i] * v.component(j)[i] * inv[j];
      out[i] = std::sqrt(s);
    }
    return out;
  }
  const Matrix& p = m.precision();
  Vector x(d);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int j = 0; j < d; ++j) x(j) = v.component(j)[i];
    out[i] = std::sqrt(std::max(0.0, x.dot(p * x)));
  }
  return out;
}

double integrate_h_norm(const HVectorField& v) {
  const auto norms = h_norms(v);
  const auto& w = v.domain()->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) sum += w[i] * norms[i];
  return sum;
}

double a_half(double t) {
  if (t <= 0.0) return 0.0;
  // s = r^2 removes the sqrt(s) behaviour of the integrand at the origin.
  auto integrand = [](double r) { return 2.0 * r * std::sqrt(std::log1p(r * r)); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0,
                                                                       std::sqrt(t), 15, 1e-13);
}

double llogl_gauge(const GridField& u) {
  const auto& w = u.space().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * a_half(std::abs(u[i]));
  return sum;
}

double interpolate(const GridField& u, std::span<const double> x) {
  const auto& grid = u.grid();
  const int d = grid.dim();
  if (static_cast<int>(x.size()) != d) throw DomainError("interpolate: dimension mismatch");
  const int n = grid.nodes_per_axis();
  std::array<int, 3> lo{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int k = 0; k < d; ++k) {
    const double s = std::clamp((x[k] + grid.radius()) / grid.spacing(), 0.0,
                                static_cast<double>(n - 1));
    lo[k] = std::min(static_cast<int>(s), n - 2);
    frac[k] = s - lo[k];
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::size_t flat = 0;
    for (int k = 0; k < d; ++k) {
      const int bit = (corner >> k) & 1;
      weight *= bit ? frac[k] : 1.0 - frac[k];
      flat += static_cast<std::size_t>(lo[k] + bit) * grid.stride(k);
    }
    if (weight != 0.0) acc += weight * u[flat];
  }
  return acc;
}

}  // namespace gaussbv
