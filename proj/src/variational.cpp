#include "gaussbv/variational.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/rng.hpp"
#include "gaussbv/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gaussbv {

namespace {

// Weighted-metric H-gradient K u = L^T grad u and its adjoint
// K* p = (1/w) sum_j D_j^T (w (L p)_j).
// Forward differences with a zero difference on the last node of each line.
// The difference at node i approximates the gradient at the centre of the
// cell [x_i, x_i + h]^d and carries that cell's mass as its weight, so only
// constants lie in the kernel.
class GradientOperator {
 public:
  explicit GradientOperator(DomainPtr domain)
      : domain_(std::move(domain)), l_(domain_->measure().square_root()) {
    const auto& grid = domain_->grid();
    const int n = grid.nodes_per_axis();
    const double h = grid.spacing();
    d_.n_in = n;
    d_.start.resize(n);
    d_.coef.resize(n);
    for (int i = 0; i + 1 < n; ++i) {
      d_.start[i] = i;
      d_.coef[i] = {-1.0 / h, 1.0 / h};
    }
    d_.start[n - 1] = n - 2;
    d_.coef[n - 1] = {0.0, 0.0};
    const int d = grid.dim();
    cell_weights_.resize(grid.size());
    Vector centre(d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = grid.point(i);
      for (int j = 0; j < d; ++j) centre(j) = x[j] + 0.5 * h;
      cell_weights_[i] = std::pow(h, d) * domain_->measure().density(centre);
    }
  }

  int dim() const { return domain_->dim(); }
  std::size_t size() const { return domain_->size(); }
  const std::vector<double>& cell_weights() const { return cell_weights_; }

  std::vector<std::vector<double>> forward(const std::vector<double>& u) const {
    const int d = dim();
    const std::size_t n = size();
    std::vector<std::vector<double>> partial(d, std::vector<double>(n));
    for (int j = 0; j < d; ++j) d_.apply(domain_->grid(), j, u, partial[j]);
    std::vector<std::vector<double>> out(d, std::vector<double>(n, 0.0));
    for (int k = 0; k < d; ++k) {
      for (int j = 0; j < d; ++j) {
        const double ljk = l_(j, k);
        if (ljk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[k][i] += ljk * partial[j][i];
      }
    }
    return out;
  }

  /// Adjoint between the cell-weighted and node-weighted pairings.
  std::vector<double> adjoint(const std::vector<std::vector<double>>& p) const {
    const int d = dim();
    const std::size_t n = size();
    const auto& w = domain_->weights();
    std::vector<double> out(n, 0.0);
    std::vector<double> q(n);
    std::vector<double> back(n);
    for (int j = 0; j < d; ++j) {
      std::fill(q.begin(), q.end(), 0.0);
      for (int k = 0; k < d; ++k) {
        const double ljk = l_(j, k);
        if (ljk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) q[i] += ljk * p[k][i];
      }
      for (std::size_t i = 0; i < n; ++i) q[i] *= cell_weights_[i];
      d_.apply_transpose(domain_->grid(), j, q, back);
      for (std::size_t i = 0; i < n; ++i) out[i] += back[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= w[i];
    return out;
  }

 private:
  DomainPtr domain_;
  LineOperator d_;
  Matrix l_;
  std::vector<double> cell_weights_;
};

double weighted_dot(const std::vector<double>& w, const std::vector<double>& a,
                    const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

Vector node_vector(const std::vector<std::vector<double>>& comps, std::size_t i) {
  Vector v(static_cast<int>(comps.size()));
  for (std::size_t j = 0; j < comps.size(); ++j) v(static_cast<int>(j)) = comps[j][i];
  return v;
}

// Radius of the ball that must contain the conjugate maximizer.
double conjugate_radius(const ConvexIntegrand& f, const Vector& phi) {
  const auto& g = f.growth;
  if (g.kind == GrowthTag::Kind::linear) return 100.0;
  const double f0 = std::abs(f.value(Vector::Zero(phi.size())));
  const double base = (phi.norm() + g.beta1 + f0 + 1.0) / std::max(g.alpha1, 1e-12);
  return 2.0 * std::max(1.0, std::pow(base, 1.0 / std::max(g.p - 1.0, 1e-12)));
}

double conjugate_sup(const ConvexIntegrand& f, const Vector& phi, double radius) {
  const int d = static_cast<int>(phi.size());
  auto objective = [&](const Vector& h) {
    if (h.norm() > radius) return -kPlusInfinity;
    return phi.dot(h) - f.value(h);
  };
  const int per_axis = d == 1 ? 401 : (d == 2 ? 61 : 21);
  Vector best = Vector::Zero(d);
  double best_val = objective(best);
  Vector h(d);
  std::vector<int> idx(d, 0);
  const double step = 2.0 * radius / (per_axis - 1);
  for (;;) {
    for (int j = 0; j < d; ++j) h(j) = -radius + step * idx[j];
    const double v = objective(h);
    if (v > best_val) {
      best_val = v;
      best = h;
    }
    int j = 0;
    while (j < d && ++idx[j] == per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  // Points along the direction of phi, where the maximizer of a radial F lies.
  if (phi.norm() > 0.0) {
    const Vector e = phi / phi.norm();
    for (int k = 0; k <= 400; ++k) {
      const Vector p = e * (radius * k / 400.0);
      const double v = objective(p);
      if (v > best_val) {
        best_val = v;
        best = p;
      }
    }
  }
  // Compass search.
  double s = step;
  while (s > 1e-10 * std::max(1.0, radius)) {
    bool improved = false;
    for (int j = 0; j < d; ++j) {
      for (double sign : {1.0, -1.0}) {
        Vector trial = best;
        trial(j) += sign * s;
        const double v = objective(trial);
        if (v > best_val) {
          best_val = v;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) s *= 0.5;
  }
  return best_val;
}

Vector project_ball(const Vector& v, double radius) {
  const double n = v.norm();
  return n > radius ? Vector(v * (radius / n)) : v;
}

bool is_indicator(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; });
}

std::vector<char> dilate(const UniformGrid& grid, const std::vector<char>& in, int cells) {
  const int d = grid.dim();
  const int n = grid.nodes_per_axis();
  std::vector<char> out = in;
  std::vector<std::array<int, 3>> offsets;
  for (int a = -cells; a <= cells; ++a) {
    for (int b = (d > 1 ? -cells : 0); b <= (d > 1 ? cells : 0); ++b) {
      for (int c = (d > 2 ? -cells : 0); c <= (d > 2 ? cells : 0); ++c) {
        if (a * a + b * b + c * c <= cells * cells) offsets.push_back({a, b, c});
      }
    }
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in[i]) continue;
    std::array<int, 3> idx{0, 0, 0};
    for (int j = 0; j < d; ++j) idx[j] = grid.axis_index(i, j);
    for (const auto& off : offsets) {
      std::size_t flat = 0;
      bool inside = true;
      for (int j = 0; j < d && inside; ++j) {
        const int c = idx[j] + off[j];
        inside = c >= 0 && c < n;
        flat += static_cast<std::size_t>(std::max(c, 0)) * grid.stride(j);
      }
      if (inside) out[flat] = 1;
    }
  }
  return out;
}

std::vector<char> complement(const std::vector<char>& in) {
  std::vector<char> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] ? 0 : 1;
  return out;
}

IndicatorSet to_set(const DomainPtr& domain, const std::vector<char>& mask, std::string name) {
  std::vector<double> v(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) v[i] = mask[i] ? 1.0 : 0.0;
  return IndicatorSet(GridField(domain, std::move(v)), std::move(name));
}

// Every grid line meets the set in at most one run.
bool line_convex(const UniformGrid& grid, const std::vector<char>& mask) {
  const int n = grid.nodes_per_axis();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (std::size_t start : grid.line_starts(axis)) {
      int runs = 0;
      bool prev = false;
      for (int k = 0; k < n; ++k) {
        const bool now = mask[start + k * grid.stride(axis)] != 0;
        if (now && !prev) ++runs;
        prev = now;
      }
      if (runs > 1) return false;
    }
  }
  return true;
}

}  // namespace

ConvexIntegrand ConvexIntegrand::norm() {
  ConvexIntegrand f;
  f.name = "norm";
  f.value = [](const Vector& h) { return h.norm(); };
  f.conjugate_analytic = [](const Vector& phi) { return phi.norm() <= 1.0 + 1e-12 ? 0.0 : kPlusInfinity; };
  f.recession_analytic = [](const Vector& h) { return h.norm(); };
  f.conjugate_prox = [](const Vector& v, double) { return project_ball(v, 1.0); };
  f.growth = GrowthTag{GrowthTag::Kind::linear, 1.0, 1.0, 0.0, 1.0, 0.0};
  return f;
}

ConvexIntegrand ConvexIntegrand::half_squared() {
  ConvexIntegrand f;
  f.name = "half_squared";
  f.value = [](const Vector& h) { return 0.5 * h.squaredNorm(); };
  f.conjugate_analytic = [](const Vector& phi) { return 0.5 * phi.squaredNorm(); };
  f.recession_analytic = [](const Vector& h) { return h.norm() == 0.0 ? 0.0 : kPlusInfinity; };
  f.conjugate_prox = [](const Vector& v, double sigma) { return Vector(v / (1.0 + sigma)); };
  f.growth = GrowthTag{GrowthTag::Kind::p_growth, 2.0, 0.5, 0.0, 0.5, 0.0};
  return f;
}

ConvexIntegrand ConvexIntegrand::area() {
  ConvexIntegrand f;
  f.name = "area";
  f.value = [](const Vector& h) { return std::sqrt(1.0 + h.squaredNorm()); };
  f.conjugate_analytic = [](const Vector& phi) {
    const double n2 = phi.squaredNorm();
    return n2 <= 1.0 + 1e-12 ? -std::sqrt(std::max(0.0, 1.0 - n2)) : kPlusInfinity;
  };
  f.recession_analytic = [](const Vector& h) { return h.norm(); };
  // Moreau: prox_{sF*}(v) = v - s prox_{F/s}(v/s); the inner prox is radial,
  // r + (1/s) r / sqrt(1 + r^2) = |v|/s, solved by Newton from r = |v|/s.
  f.conjugate_prox = [](const Vector& v, double sigma) {
    const double z = v.norm() / sigma;
    if (z == 0.0) return Vector(v);
    double r = z;
    for (int it = 0; it < 60; ++it) {
      const double q = std::sqrt(1.0 + r * r);
      const double g = r + r / (sigma * q) - z;
      const double dg = 1.0 + 1.0 / (sigma * q * q * q);
      const double next = std::max(0.0, r - g / dg);
      if (std::abs(next - r) <= 1e-15 * std::max(1.0, r)) {
        r = next;
        break;
      }
      r = next;
    }
    return project_ball(Vector(v - sigma * (r / z) * (v / sigma)), 1.0);
  };
  f.growth = GrowthTag{GrowthTag::Kind::linear, 1.0, 1.0, 0.0, 1.0, 1.0};
  return f;
}

ConvexIntegrand ConvexIntegrand::zero() {
  ConvexIntegrand f;
  f.name = "zero";
  f.value = [](const Vector&) { return 0.0; };
  f.conjugate_analytic = [](const Vector& phi) { return phi.norm() == 0.0 ? 0.0 : kPlusInfinity; };
  f.recession_analytic = [](const Vector&) { return 0.0; };
  f.conjugate_prox = [](const Vector& v, double) { return Vector(Vector::Zero(v.size())); };
  f.growth = GrowthTag{GrowthTag::Kind::linear, 1.0, 0.0, 0.0, 0.0, 0.0};
  return f;
}

double conjugate(const ConvexIntegrand& f, const Vector& phi) {
  if (f.conjugate_analytic) return (*f.conjugate_analytic)(phi);
  return conjugate_numeric(f, phi);
}

double conjugate_numeric(const ConvexIntegrand& f, const Vector& phi) {
  if (!f.value) throw DomainError("conjugate: integrand has no evaluator");
  const double radius = conjugate_radius(f, phi);
  const double inner = conjugate_sup(f, phi, radius);
  if (f.growth.kind == GrowthTag::Kind::linear) {
    const double outer = conjugate_sup(f, phi, 2.0 * radius);
    if (outer - inner > 1e-6 * radius) return kPlusInfinity;
  }
  return inner;
}

double recession(const ConvexIntegrand& f, const Vector& h) {
  if (f.recession_analytic) return (*f.recession_analytic)(h);
  return recession_numeric(f, h);
}

double recession_numeric(const ConvexIntegrand& f, const Vector& h) {
  const double scale = h.norm();
  if (scale == 0.0) return 0.0;
  const Vector e = h / scale;
  const std::vector<double> ts{10.0, 100.0, 1000.0};
  std::vector<double> inv;
  std::vector<double> q;
  for (double t : ts) {
    inv.push_back(1.0 / t);
    q.push_back(f.value(Vector(t * e)) / t);
  }
  if (q[2] > 2.0 * std::abs(q[1]) + 1.0 && q[1] > 2.0 * std::abs(q[0]) + 1.0) return kPlusInfinity;
  return scale * extrapolate_to_zero(inv, q, 2);
}

std::vector<std::vector<double>> whitened_gradient(const GridField& u, DifferenceScheme scheme) {
  const int d = u.grid().dim();
  const Matrix& l = u.space().measure().square_root();
  std::vector<std::vector<double>> partial(d);
  for (int j = 0; j < d; ++j) partial[j] = partial_derivative(u, j, scheme);
  std::vector<std::vector<double>> out(d, std::vector<double>(u.size(), 0.0));
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      const double ljk = l(j, k);
      if (ljk == 0.0) continue;
      for (std::size_t i = 0; i < u.size(); ++i) out[k][i] += ljk * partial[j][i];
    }
  }
  return out;
}

double functional_eval(const ConvexIntegrand& f, const GridField& u) {
  const auto grad = whitened_gradient(u);
  const auto& w = u.space().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * f.value(node_vector(grad, i));
  return s;
}

double functional_eval(const ConvexIntegrand& f, const HMeasureDecomposition& decomposition) {
  const auto& ac = decomposition.ac_part;
  const auto& space = *ac.domain();
  const Matrix& l = space.measure().square_root();
  const auto& w = space.weights();
  const int d = ac.dim();
  double s = 0.0;
  Vector v(d);
  for (std::size_t i = 0; i < ac.size(); ++i) {
    for (int j = 0; j < d; ++j) v(j) = ac.component(j)[i];
    // H-vector to whitened coordinates: L^{-1} v.
    const Vector z = l.triangularView<Eigen::Lower>().solve(v);
    s += w[i] * f.value(z);
  }
  for (const auto& atom : decomposition.singular) {
    if (atom.mass == 0.0) continue;
    const Vector z = l.triangularView<Eigen::Lower>().solve(atom.direction);
    const double r = recession(f, z);
    if (!std::isfinite(r)) throw DomainError("functional_eval: recession is infinite on a singular direction");
    s += atom.mass * r;
  }
  return s;
}

double functional_eval_dual(const ConvexIntegrand& f, const GridField& u, int iterations) {
  if (!f.conjugate_prox || !f.conjugate_analytic) {
    throw UnsupportedError("functional_eval_dual: integrand has no conjugate evaluator");
  }
  const auto grad = whitened_gradient(u);
  const auto& w = u.space().weights();
  const int d = u.grid().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vector g = -node_vector(grad, i);
    Vector phi = Vector::Zero(d);
    double best = -kPlusInfinity;
    for (int it = 0; it < iterations; ++it) {
      phi = (*f.conjugate_prox)(phi + g, 1.0);
      const double c = (*f.conjugate_analytic)(phi);
      if (std::isfinite(c)) best = std::max(best, g.dot(phi) - c);
    }
    total += w[i] * (std::isfinite(best) ? best : 0.0);
  }
  return total;
}

double gradient_operator_norm(const DomainPtr& domain, int iterations) {
  const GradientOperator k(domain);
  const auto& w = domain->weights();
  auto engine = make_engine(0x6e6f726d, 0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> x(domain->size());
  for (double& v : x) v = uniform(engine);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const double nx = std::sqrt(weighted_dot(w, x, x));
    for (double& v : x) v /= nx;
    std::vector<double> y = k.adjoint(k.forward(x));
    lambda = weighted_dot(w, x, y);
    x = std::move(y);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

VariationalSolution rof_minimize(const ConvexIntegrand& f, const GridField& g, const RofOptions& options) {
  if (!f.conjugate_prox || !f.conjugate_analytic) {
    throw UnsupportedError("rof_minimize: integrand needs an analytic conjugate and its prox");
  }
  if (!(options.tol > 0.0) || options.max_iters < 1) throw DomainError("rof_minimize: invalid tolerance");
  if (options.initial && options.initial->domain() != g.domain()) {
    throw DomainError("rof_minimize: initial field lives on another grid");
  }
  const DomainPtr& domain = g.domain();
  const GradientOperator k(domain);
  const auto& w = domain->weights();
  const auto& cw = k.cell_weights();
  const std::size_t n = g.size();
  const int d = domain->dim();
  const auto& gv = g.values();

  const double norm_k = 1.01 * gradient_operator_norm(domain);
  double tau = 1.0 / norm_k;
  double sigma = 1.0 / norm_k;
  constexpr double kStrongConvexity = 1.0;

  std::vector<double> u = options.initial ? options.initial->values() : gv;
  std::vector<double> u_bar = u;
  std::vector<std::vector<double>> p(d, std::vector<double>(n, 0.0));

  auto primal = [&](const std::vector<double>& x) {
    const auto kx = k.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += cw[i] * f.value(node_vector(kx, i)) + w[i] * 0.5 * (x[i] - gv[i]) * (x[i] - gv[i]);
    }
    return s;
  };
  auto dual = [&](const std::vector<double>& kstar_p) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = (*f.conjugate_analytic)(node_vector(p, i));
      if (!std::isfinite(c)) return -kPlusInfinity;
      s += w[i] * (-0.5 * kstar_p[i] * kstar_p[i] + kstar_p[i] * gv[i]) - cw[i] * c;
    }
    return s;
  };

  double best_primal = primal(u);
  std::vector<double> best_u = u;
  double best_dual = -kPlusInfinity;
  std::vector<double> trace;
  const int workers = worker_count();
  for (int it = 1; it <= options.max_iters; ++it) {
    const auto ku = k.forward(u_bar);
#pragma omp parallel for num_threads(workers) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      Vector v(d);
      for (int j = 0; j < d; ++j) v(j) = p[j][i] + sigma * ku[j][i];
      const Vector next = (*f.conjugate_prox)(v, sigma);
      for (int j = 0; j < d; ++j) p[j][i] = next(j);
    }
    const std::vector<double> kstar_p = k.adjoint(p);
    std::vector<double> u_next(n);
    for (std::size_t i = 0; i < n; ++i) u_next[i] = (u[i] - tau * kstar_p[i] + tau * gv[i]) / (1.0 + tau);
    const double theta = 1.0 / std::sqrt(1.0 + 2.0 * kStrongConvexity * tau);
    tau *= theta;
    sigma /= theta;
    for (std::size_t i = 0; i < n; ++i) u_bar[i] = u_next[i] + theta * (u_next[i] - u[i]);
    u.swap(u_next);

    const double pv = primal(u);
    if (pv < best_primal) {
      best_primal = pv;
      best_u = u;
    }
    best_dual = std::max(best_dual, dual(kstar_p));
    trace.push_back(best_primal);
    const double gap = best_primal - best_dual;
    if (gap < options.tol) {
      return VariationalSolution{GridField(domain, std::move(best_u)), best_primal, best_dual, gap, it,
                                 std::move(trace)};
    }
  }
  throw ConvergenceError("rof_minimize: duality gap above tolerance after " +
                             std::to_string(options.max_iters) + " iterations",
                         best_primal - best_dual);
}

VariationalSolution rof_minimize(const ConvexIntegrand& f, const GridField& g, double tol, int max_iters) {
  RofOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  return rof_minimize(f, g, options);
}

ConvexityCheck convexity_check(const GridField& u) { return convexity_check(u, kPlusInfinity); }

ConvexityCheck convexity_check(const GridField& u, double core_radius) {
  const auto& grid = u.grid();
  const int d = grid.dim();
  if (d > 2) throw UnsupportedError("convexity_check: dimension must be at most 2");
  const int n = grid.nodes_per_axis();
  const double h = grid.spacing();
  auto in_core = [&](int a, int b) {
    return std::abs(grid.coordinate(a)) <= core_radius && (d == 1 || std::abs(grid.coordinate(b)) <= core_radius);
  };
  double peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (in_core(grid.axis_index(i, 0), d == 2 ? grid.axis_index(i, 1) : 0)) peak = std::max(peak, std::abs(u[i]));
  }
  ConvexityCheck out;
  out.tol = 10.0 * h * h * peak;
  double lowest = kPlusInfinity;
  // Steps (in index units) along the axes and, in 2-D, both diagonals.
  std::vector<std::array<int, 2>> steps{{1, 0}};
  if (d == 2) steps = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const int a = grid.axis_index(i, 0);
    const int b = d == 2 ? grid.axis_index(i, 1) : 0;
    for (const auto& s : steps) {
      const int a0 = a - s[0], a1 = a + s[0];
      const int b0 = b - s[1], b1 = b + s[1];
      const int nb = d == 2 ? n : 1;
      if (a0 < 0 || a1 >= n || std::min(b0, b1) < 0 || std::max(b0, b1) >= nb) continue;
      if (!in_core(a0, b0) || !in_core(a1, b1)) continue;
      const std::size_t lo = a0 + static_cast<std::size_t>(b0) * (d == 2 ? grid.stride(1) : 0);
      const std::size_t hi = a1 + static_cast<std::size_t>(b1) * (d == 2 ? grid.stride(1) : 0);
      const double len2 = (s[0] * s[0] + s[1] * s[1]) * h * h;
      lowest = std::min(lowest, (u[lo] - 2.0 * u[i] + u[hi]) / len2);
    }
  }
  out.min_second_difference = std::isfinite(lowest) ? lowest : 0.0;
  out.pass = out.min_second_difference >= -out.tol;
  return out;
}

double geometric_functional(const IndicatorSet& e, const GridField& g, double t,
                            const std::vector<double>& schedule) {
  const auto& chi = e.membership();
  const auto& w = chi.space().weights();
  double fidelity = 0.0;
  bool any = false;
  bool all = true;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i] != 0.0) {
      fidelity += w[i] * (g[i] - t);
      any = true;
    } else {
      all = false;
    }
  }
  const double per = (any && !all) ? tv_semigroup(chi, schedule) : 0.0;
  return per - fidelity;
}

std::vector<LevelSetReport> geometric_levelset_check(const GridField& g, const std::vector<double>& t_levels,
                                                     const LevelSetOptions& options) {
  if (!convexity_check(g).pass) throw DomainError("geometric_levelset_check: g must be convex");
  const VariationalSolution sol =
      rof_minimize(ConvexIntegrand::norm(), g, options.rof_tol, options.rof_max_iters);
  const GridField& u = sol.minimizer;
  const DomainPtr& domain = g.domain();
  const auto& grid = u.grid();
  double lo = u[0], hi = u[0];
  for (double v : u.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = std::max(hi - lo, 1e-12);

  std::vector<LevelSetReport> out;
  for (double t : t_levels) {
    auto level_mask = [&](double s) {
      std::vector<char> m(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) m[i] = u[i] > s ? 1 : 0;
      return m;
    };
    const std::vector<char> mask = level_mask(t);
    LevelSetReport r;
    r.t = t;
    r.value = geometric_functional(to_set(domain, mask, "level set"), g, t, options.schedule);
    r.empty = std::none_of(mask.begin(), mask.end(), [](char c) { return c != 0; });
    r.convex = line_convex(grid, mask);

    std::vector<std::pair<std::string, std::vector<char>>> competitors;
    for (int cells = 1; cells <= 3; ++cells) {
      competitors.emplace_back("dilation " + std::to_string(cells), dilate(grid, mask, cells));
      competitors.emplace_back("erosion " + std::to_string(cells),
                               complement(dilate(grid, complement(mask), cells)));
    }
    for (double frac : {0.02, 0.05, 0.1}) {
      competitors.emplace_back("threshold +" + std::to_string(frac), level_mask(t + frac * range));
      competitors.emplace_back("threshold -" + std::to_string(frac), level_mask(t - frac * range));
    }
    r.best_competitor_value = kPlusInfinity;
    for (auto& [name, m] : competitors) {
      const double v = geometric_functional(to_set(domain, m, name), g, t, options.schedule);
      if (v < r.best_competitor_value) {
        r.best_competitor_value = v;
        r.best_competitor = name;
      }
    }
    double fidelity = 0.0;
    const auto& w = u.space().weights();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (mask[i]) fidelity += w[i] * std::abs(g[i] - t);
    }
    r.tolerance = 0.01 * (std::abs(r.value) + fidelity) + 1e-4;
    r.pass = r.value <= r.best_competitor_value + r.tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

RelaxedPerimeter relaxed_perimeter_detailed(const GridField& u, RangeConvention convention,
                                            int dual_iterations) {
  const double lo = convention == RangeConvention::unit ? 0.0 : -1.0;
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < lo - 1e-12 || u[i] > 1.0 + 1e-12) {
      throw DomainError("relaxed_perimeter: values outside the admissible range");
    }
    const double x = std::clamp(u[i], lo, 1.0);
    v[i] = convention == RangeConvention::unit ? x : 0.5 * (x + 1.0);
  }
  const GridField field(u.domain(), v);
  RelaxedPerimeter out;
  out.indicator = is_indicator(v);
  if (out.indicator) {
    const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    out.primal = constant ? 0.0 : tv_semigroup(field);
    out.dual = constant ? 0.0 : tv_dual(field, dual_iterations);
    return out;
  }

  const auto& space = u.space();
  const auto& w = space.weights();
  const int d = space.dim();
  const std::size_t n = u.size();
  const auto grad = whitened_gradient(field);
  std::vector<double> prof(n);
  for (std::size_t i = 0; i < n; ++i) prof[i] = isoperimetric_profile(v[i]);

  for (std::size_t i = 0; i < n; ++i) {
    double s = prof[i] * prof[i];
    for (int j = 0; j < d; ++j) s += grad[j][i] * grad[j][i];
    out.primal += w[i] * std::sqrt(s);
  }

  // Dual: objective sum_i w_i (<-grad v, psi> + U(v) xi), (psi, xi) in the unit ball.
  const double tau = 0.5 * space.spacing();
  std::vector<std::vector<double>> c(d + 1, std::vector<double>(n));
  for (int j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) c[j][i] = -grad[j][i];
  }
  c[d] = prof;
  std::vector<std::vector<double>> z(d + 1, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) z[d][i] = 1.0;  // xi = 1 is feasible and ascends when U > 0
  double best = -kPlusInfinity;
  for (int it = 0; it < dual_iterations; ++it) {
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double norm2 = 0.0;
      for (int j = 0; j <= d; ++j) {
        z[j][i] += tau * c[j][i];
        norm2 += z[j][i] * z[j][i];
      }
      if (norm2 > 1.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (int j = 0; j <= d; ++j) z[j][i] *= inv;
      }
      double dot = 0.0;
      for (int j = 0; j <= d; ++j) dot += c[j][i] * z[j][i];
      value += w[i] * dot;
    }
    best = std::max(best, value);
  }
  out.dual = best;
  return out;
}

double relaxed_perimeter(const GridField& u, RangeConvention convention) {
  return relaxed_perimeter_detailed(u, convention).primal;
}

WeakLscWitness weak_lsc_witness(const DomainPtr& domain, int n_sets, const std::vector<double>& schedule) {
  if (n_sets < 1) throw DomainError("weak_lsc_witness: need at least one set");
  WeakLscWitness out;
  const int d = domain->dim();
  for (int k = 0; k < n_sets; ++k) {
    Vector normal = Vector::Zero(d);
    normal(k % d) = -1.0;
    out.perimeters.push_back(
        tv_semigroup(IndicatorSet::halfspace(domain, normal, 0.0).membership(), schedule));
  }
  const GridField half = GridField::constant(domain, 0.5);
  out.limit_relaxed = relaxed_perimeter(half);
  out.limit_is_indicator = is_indicator(half.values());
  return out;
}

}  // namespace gaussbv
