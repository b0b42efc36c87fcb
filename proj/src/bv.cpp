#include "gaussbv/bv.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/rng.hpp"

#include <Eigen/QR>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace gaussbv {

namespace {

bool is_indicator_values(const std::vector<double>& v) {
  bool zero = false;
  bool one = false;
  for (double x : v) {
    if (x == 0.0) {
      zero = true;
    } else if (x == 1.0) {
      one = true;
    } else {
      return false;
    }
  }
  return zero && one;
}

void validate_schedule(const std::vector<double>& schedule, double floor, const char* op,
                       std::size_t min_points = 1) {
  if (schedule.size() < min_points) {
    throw DomainError(std::string(op) + ": schedule needs at least " + std::to_string(min_points) +
                      " points");
  }
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0) || !std::isfinite(schedule[k])) {
      throw DomainError(std::string(op) + ": schedule entries must be positive");
    }
    if (k > 0 && !(schedule[k] < schedule[k - 1])) {
      throw DomainError(std::string(op) + ": schedule must be strictly decreasing");
    }
  }
  if (schedule.back() < floor * (1.0 - 1e-12)) {
    throw GridError(std::string(op) + ": smallest schedule time " + std::to_string(schedule.back()) +
                    " is below the grid floor " + std::to_string(floor));
  }
}

// For smooth boundaries int |grad_H T_t u| expands in integer powers of t,
// so the limit is taken from a quadratic in t through the three smallest
// times. Larger times only enter the monotonicity flag: for sets with nearby
// boundary pieces their values carry overlap terms that no low-order
// polynomial captures.
double extrapolate_schedule(const std::vector<double>& times, const std::vector<double>& raw) {
  const std::size_t k = std::min<std::size_t>(3, times.size());
  const std::vector<double> t(times.end() - k, times.end());
  const std::vector<double> v(raw.end() - k, raw.end());
  return extrapolate_to_zero(t, v, 2);
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] * (1.0 - 1e-12)) return false;
  }
  return true;
}

double weighted_abs_sum(const std::vector<double>& w, const std::vector<double>& v, double scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::abs(v[i]);
  return scale * s;
}

int axis_of_direction(const GaussianGrid& space, const Vector& nu, const char* op) {
  if (nu.size() != space.dim()) throw DomainError(std::string(op) + ": direction has wrong dimension");
  int axis = -1;
  const double scale = nu.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw DomainError(std::string(op) + ": zero direction");
  for (int j = 0; j < nu.size(); ++j) {
    if (std::abs(nu(j)) > 1e-12 * scale) {
      if (axis >= 0) throw UnsupportedError(std::string(op) + ": only axis-aligned directions");
      axis = j;
    }
  }
  return axis;
}

}  // namespace

IndicatorSet::IndicatorSet(GridField membership, std::string description)
    : membership_(std::move(membership)), description_(std::move(description)) {
  for (double v : membership_.values()) {
    if (v != 0.0 && v != 1.0) throw DomainError("IndicatorSet: membership values must be 0 or 1");
  }
}

IndicatorSet IndicatorSet::from_predicate(DomainPtr domain,
                                          const std::function<bool(std::span<const double>)>& inside,
                                          std::string description) {
  GridField f = GridField::from_function(std::move(domain), [&](std::span<const double> x) {
    return inside(x) ? 1.0 : 0.0;
  });
  return IndicatorSet(std::move(f), std::move(description));
}

IndicatorSet IndicatorSet::halfspace(DomainPtr domain, const Vector& normal, double offset) {
  if (normal.size() != domain->dim()) throw DomainError("halfspace: normal has wrong dimension");
  if (!(normal.norm() > 0.0)) throw DomainError("halfspace: zero normal");
  return from_predicate(
      std::move(domain),
      [normal, offset](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += normal(j) * x[j];
        return s > offset;
      },
      "halfspace");
}

IndicatorSet IndicatorSet::ball(DomainPtr domain, const Vector& center, double radius) {
  if (center.size() != domain->dim()) throw DomainError("ball: center has wrong dimension");
  if (!(radius >= 0.0)) throw DomainError("ball: negative radius");
  return from_predicate(
      std::move(domain),
      [center, radius](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - center(j)) * (x[j] - center(j));
        return s < radius * radius;
      },
      "ball");
}

IndicatorSet IndicatorSet::box(DomainPtr domain, const Vector& half_widths) {
  if (half_widths.size() != domain->dim()) throw DomainError("box: wrong dimension");
  if ((half_widths.array() < 0.0).any()) throw DomainError("box: negative half-width");
  return from_predicate(
      std::move(domain),
      [half_widths](std::span<const double> x) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          if (std::abs(x[j]) > half_widths(j)) return false;
        }
        return true;
      },
      "box");
}

IndicatorSet IndicatorSet::whole(DomainPtr domain) {
  return IndicatorSet(GridField::constant(std::move(domain), 1.0), "whole space");
}

IndicatorSet IndicatorSet::empty(DomainPtr domain) {
  return IndicatorSet(GridField::constant(std::move(domain), 0.0), "empty set");
}

std::vector<double> default_time_schedule() { return {0.08, 0.04, 0.02, 0.01}; }

double time_floor(const UniformGrid& grid) {
  const double h = grid.spacing();
  return 4.0 * h * h;
}

double extrapolate_to_zero(const std::vector<double>& abscissae, const std::vector<double>& values,
                           int degree) {
  const auto n = static_cast<int>(abscissae.size());
  if (n == 0 || values.size() != abscissae.size()) {
    throw DomainError("extrapolate_to_zero: need matching, nonempty samples");
  }
  degree = std::clamp(degree, 0, n - 1);
  const double scale = std::max(1e-300, *std::max_element(abscissae.begin(), abscissae.end(),
                                                          [](double a, double b) {
                                                            return std::abs(a) < std::abs(b);
                                                          }));
  Matrix a(n, degree + 1);
  Vector b(n);
  for (int i = 0; i < n; ++i) {
    const double x = abscissae[i] / scale;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = p;
      p *= x;
    }
    b(i) = values[i];
  }
  const Vector c = a.colPivHouseholderQr().solve(b);
  return c(0);
}

DualTVResult tv_dual_detailed(const GridField& u, const DualTVOptions& options) {
  if (options.iterations < 1) throw DomainError("tv_dual: need at least one ascent step");
  const auto& space = u.space();
  const auto& grid = space.grid();
  const auto& measure = space.measure();
  const int d = grid.dim();
  const int n = grid.nodes_per_axis();
  const double h = grid.spacing();
  const Matrix& l = measure.square_root();
  const Matrix& prec = measure.precision();
  const int iterations = options.iterations;
  const double tau = options.step_factor * h;

  // Phi is piecewise multilinear on a coarser lattice, spacing s cells, and
  // vanishes on the outer coarse nodes. Its values are convex combinations
  // of the coarse node values, so |psi_k|_H <= 1 at the nodes keeps Phi
  // feasible everywhere.
  int s = 1;
  for (int cand : {4, 2}) {
    if ((n - 1) % cand == 0 && (n - 1) / cand >= 4) {
      s = cand;
      break;
    }
  }
  const int nc = (n - 1) / s + 1;
  const double big_h = s * h;
  std::size_t interior = 1;
  for (int j = 0; j < d; ++j) interior *= static_cast<std::size_t>(nc - 2);

  std::optional<HVectorField> smooth;
  if (measure.is_diagonal()) smooth.emplace(ou_gradient(u, time_floor(grid)));

  const double gl[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  const int corners = 1 << d;
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (interior + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(iterations, 0.0));

#pragma omp parallel for num_threads(worker_count()) schedule(dynamic, 1)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(blocks); ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    auto engine = make_engine(options.seed, b);
    std::normal_distribution<double> normal;
    auto& hist = partial[b];
    Vector c(d), g(d), z(d), x(d), init(d);
    std::array<int, 3> coarse{0, 0, 0};
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> cell{0, 0, 0};
    const std::size_t end = std::min(interior, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) {
      std::size_t rest = k;
      std::size_t cells = 1;
      for (int j = 0; j < d; ++j) {
        coarse[j] = 1 + static_cast<int>(rest % static_cast<std::size_t>(nc - 2));
        rest /= static_cast<std::size_t>(nc - 2);
        lo[j] = (coarse[j] - 1) * s;
        cells *= static_cast<std::size_t>(2 * s);
      }
      // c = int u div_gamma(b_k e_j) dgamma over the support of the hat b_k,
      // two Gauss-Legendre points per fine cell axis; m = int b_k dgamma.
      c.setZero();
      double mass = 0.0;
      for (std::size_t fc = 0; fc < cells; ++fc) {
        std::size_t r = fc;
        std::size_t base = 0;
        for (int j = 0; j < d; ++j) {
          cell[j] = lo[j] + static_cast<int>(r % static_cast<std::size_t>(2 * s));
          r /= static_cast<std::size_t>(2 * s);
          base += static_cast<std::size_t>(cell[j]) * grid.stride(j);
        }
        for (int q = 0; q < corners; ++q) {
          std::array<double, 3> xi{};
          std::array<double, 3> hat{};
          std::array<double, 3> dhat{};
          double weight = 1.0;
          for (int j = 0; j < d; ++j) {
            xi[j] = gl[(q >> j) & 1];
            x(j) = grid.coordinate(cell[j]) + xi[j] * h;
            const double off = (cell[j] + xi[j]) / s - coarse[j];
            hat[j] = 1.0 - std::abs(off);
            dhat[j] = (off < 0.0 ? 1.0 : -1.0) / big_h;
            weight *= 0.5 * h;
          }
          weight *= measure.density(x);
          double value = 0.0;
          for (int m = 0; m < corners; ++m) {
            std::size_t node = base;
            double vw = 1.0;
            for (int j = 0; j < d; ++j) {
              const bool up = (m >> j) & 1;
              if (up) node += grid.stride(j);
              vw *= up ? xi[j] : 1.0 - xi[j];
            }
            value += vw * u[node];
          }
          double bk = 1.0;
          for (int j = 0; j < d; ++j) bk *= hat[j];
          const Vector drift = prec * (x - measure.mean());
          for (int j = 0; j < d; ++j) {
            double db = dhat[j];
            for (int m = 0; m < d; ++m) {
              if (m != j) db *= hat[m];
            }
            c(j) += weight * value * (db - bk * drift(j));
          }
          mass += weight * bk;
        }
      }
      // sup <c, psi> over |psi|_H <= 1 is sup <L^T c, z> over |z| <= 1.
      g = l.transpose() * c;
      if (!(mass > 0.0)) continue;
      const Vector gd = g / mass;

      std::size_t node = 0;
      for (int j = 0; j < d; ++j) node += static_cast<std::size_t>(coarse[j] * s) * grid.stride(j);
      if (smooth) {
        for (int j = 0; j < d; ++j) init(j) = -smooth->component(j)[node] / measure.axis_sd(j);
        z = init;
      } else {
        z = gd;
      }
      double norm = z.norm();
      if (!(norm > 1e-300)) {
        for (int j = 0; j < d; ++j) z(j) = normal(engine);
        norm = z.norm();
      }
      z /= norm;
      for (int it = 0; it < iterations; ++it) {
        z += tau * gd;
        const double len = z.norm();
        if (len > 1.0) z /= len;
        hist[it] += g.dot(z);
      }
    }
  }

  DualTVResult out;
  out.history.assign(iterations, 0.0);
  for (const auto& hist : partial) {
    for (int it = 0; it < iterations; ++it) out.history[it] += hist[it];
  }
  for (int it = 1; it < iterations; ++it) out.history[it] = std::max(out.history[it], out.history[it - 1]);
  out.value = out.history.back();
  return out;
}

double tv_dual(const GridField& u, int iterations, std::uint64_t seed) {
  return tv_dual_detailed(u, DualTVOptions{iterations, seed}).value;
}

ScheduleTV tv_semigroup_detailed(const GridField& u, const std::vector<double>& schedule) {
  validate_schedule(schedule, time_floor(u.grid()), "tv_semigroup");
  ScheduleTV out;
  out.times = schedule;
  for (double t : schedule) out.raw.push_back(integrate_h_norm(ou_gradient(u, t)));
  out.value = extrapolate_schedule(out.times, out.raw);
  out.monotone = nondecreasing(out.raw);
  return out;
}

double tv_semigroup(const GridField& u, const std::vector<double>& schedule) {
  return tv_semigroup_detailed(u, schedule).value;
}

ScheduleTV tv_relaxation_detailed(const GridField& u, const std::vector<double>& schedule) {
  validate_schedule(schedule, time_floor(u.grid()), "tv_relaxation");
  ScheduleTV out;
  out.times = schedule;
  for (double t : schedule) out.raw.push_back(integrate_h_norm(gradient(ou_apply(u, t))));
  out.value = extrapolate_schedule(out.times, out.raw);
  out.monotone = nondecreasing(out.raw);
  return out;
}

double tv_relaxation(const GridField& u, const std::vector<double>& schedule) {
  return tv_relaxation_detailed(u, schedule).value;
}

double tv_smooth(const GridField& u) {
  if (is_indicator_values(u.values())) {
    throw DomainError("tv_smooth: field is an indicator; use tv_semigroup or tv_dual");
  }
  return integrate_h_norm(gradient(u));
}

double tv_directional(const GridField& u, const Vector& nu) {
  const auto& space = u.space();
  space.require_diagonal("tv_directional");
  const int axis = axis_of_direction(space, nu, "tv_directional");
  const double h_norm = std::abs(nu(axis)) / space.measure().axis_sd(axis);
  if (std::abs(h_norm - 1.0) > 1e-9) throw DomainError("tv_directional: |nu|_H must be 1");
  // The 1-D dual supremum on a line is attained at phi = -sign(d_nu u), so
  // each line contributes its weighted l1 norm of the directional derivative.
  return weighted_abs_sum(space.weights(), partial_derivative(u, axis), std::abs(nu(axis)));
}

SlicingCheck slicing_check(const GridField& u, int axis, const std::vector<double>& schedule) {
  const auto& space = u.space();
  if (space.dim() < 2) throw DomainError("slicing_check: needs dimension >= 2");
  if (axis < 0 || axis >= space.dim()) throw DomainError("slicing_check: axis out of range");
  space.require_diagonal("slicing_check");
  validate_schedule(schedule, time_floor(u.grid()), "slicing_check");
  const double sd = space.measure().axis_sd(axis);
  Vector nu = Vector::Zero(space.dim());
  nu(axis) = sd;

  SlicingCheck out;
  out.lhs = tv_directional(u, nu);
  // Each slice u_y is smoothed by the 1-D semigroup of its own axis only;
  // weights along the slice times gamma^perp give the full node weights.
  std::vector<double> raw;
  std::vector<double> deriv(u.size());
  for (double t : schedule) {
    const LineOperator op = ou_line_operator(space, axis, SemigroupParams{t}, true);
    op.apply(u.grid(), axis, u.values(), deriv);
    raw.push_back(weighted_abs_sum(space.weights(), deriv, sd));
  }
  out.rhs = extrapolate_schedule(schedule, raw);
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.pass = scale < 1e-12 || std::abs(out.lhs - out.rhs) <= 0.01 * scale;
  return out;
}

double relative_spread(const std::vector<double>& values) {
  double spread = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    for (std::size_t b = a + 1; b < values.size(); ++b) {
      const double scale = std::max(std::abs(values[a]), std::abs(values[b]));
      if (scale > 0.0) spread = std::max(spread, std::abs(values[a] - values[b]) / scale);
    }
  }
  return spread;
}

TVReport tv_report(const GridField& u, bool smooth, const BVOptions& options) {
  TVReport r;
  r.tv_dual = tv_dual_detailed(u, options.dual).value;
  r.tv_semigroup = tv_semigroup(u, options.schedule);
  r.tv_relaxation = tv_relaxation(u, options.schedule);
  std::vector<double> all{r.tv_dual, r.tv_semigroup, r.tv_relaxation};
  if (smooth) {
    r.tv_smooth = tv_smooth(u);
    all.push_back(*r.tv_smooth);
  }
  r.spread = relative_spread(all);
  return r;
}

TVReport perimeter(const IndicatorSet& e, const BVOptions& options) {
  return tv_report(e.membership(), false, options);
}

IsoperimetricCheck isoperimetric_check(const IndicatorSet& e, const BVOptions& options) {
  IsoperimetricCheck out;
  out.perimeter = tv_semigroup(e.membership(), options.schedule);
  out.volume = e.volume();
  out.profile = isoperimetric_profile(std::clamp(out.volume, 0.0, 1.0));
  out.pass = out.perimeter >= out.profile * (1.0 - 0.02);
  const double tol = out.profile > 0.0 ? 0.02 * out.profile : 1e-6;
  out.equality = std::abs(out.perimeter - out.profile) <= tol;
  return out;
}

std::vector<double> default_minkowski_radii(const UniformGrid& grid) {
  const double h = grid.spacing();
  std::vector<double> radii;
  for (int k = 20; k >= 4; --k) radii.push_back(0.5 * k * h);
  return radii;
}

double minkowski_content(const IndicatorSet& e, const std::vector<double>& radii) {
  const auto& space = e.membership().space();
  const auto& grid = space.grid();
  const double h = grid.spacing();
  if (radii.size() < 3) throw DomainError("minkowski_content: need at least three radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] >= 2.0 * h * (1.0 - 1e-12))) {
      throw GridError("minkowski_content: radii must be at least 2h");
    }
    if (k > 0 && !(radii[k] < radii[k - 1])) {
      throw DomainError("minkowski_content: radii must be strictly decreasing");
    }
  }
  const int d = grid.dim();
  const int n = grid.nodes_per_axis();
  const auto& chi = e.membership().values();
  const auto& w = space.weights();

  // Boundary members: nodes of E with an axis neighbour outside E.
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i] == 0.0) continue;
    bool edge = false;
    for (int j = 0; j < d && !edge; ++j) {
      const int c = grid.axis_index(i, j);
      edge = (c > 0 && chi[i - grid.stride(j)] == 0.0) || (c + 1 < n && chi[i + grid.stride(j)] == 0.0);
    }
    if (edge) boundary.push_back(i);
  }

  // Distance (in cells) from each outside node to the nearest member cell
  // [x_i - h/2, x_i + h/2]^d, searched within the largest radius.
  const int k_max = static_cast<int>(std::ceil(radii.front() / h + 0.5));
  const double none = std::numeric_limits<double>::infinity();
  std::vector<double> dist(chi.size(), none);
  for (std::size_t i : boundary) {
    std::array<int, 3> idx{0, 0, 0};
    for (int j = 0; j < d; ++j) idx[j] = grid.axis_index(i, j);
    for (int a = -k_max; a <= k_max; ++a) {
      for (int b = (d > 1 ? -k_max : 0); b <= (d > 1 ? k_max : 0); ++b) {
        for (int c = (d > 2 ? -k_max : 0); c <= (d > 2 ? k_max : 0); ++c) {
          const std::array<int, 3> off{a, b, c};
          double r2 = 0.0;
          for (int j = 0; j < d; ++j) {
            const double gap = std::max(std::abs(off[j]) - 0.5, 0.0);
            r2 += gap * gap;
          }
          std::size_t flat = 0;
          bool inside = true;
          for (int j = 0; j < d && inside; ++j) {
            const int p = idx[j] + off[j];
            inside = p >= 0 && p < n;
            flat += static_cast<std::size_t>(std::max(p, 0)) * grid.stride(j);
          }
          if (inside && chi[flat] == 0.0) dist[flat] = std::min(dist[flat], std::sqrt(r2));
        }
      }
    }
  }

  const auto m = radii.size();
  std::vector<double> gained(m);
  for (std::size_t k = 0; k < m; ++k) {
    // A node covers distances within half a cell of its own; count the
    // covered fraction so the gained mass is continuous in r.
    const double lim = radii[k] / h;
    double g = 0.0;
    for (std::size_t i = 0; i < chi.size(); ++i) {
      if (dist[i] != none) g += w[i] * std::clamp(lim - dist[i] + 0.5, 0.0, 1.0);
    }
    gained[k] = g;
  }
  // Quotients between consecutive radii estimate P(E_r) at the midpoints,
  // which is smooth in r and extrapolates cleanly to r = 0.
  std::vector<double> mid, slope;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    mid.push_back(0.5 * (radii[k] + radii[k + 1]));
    slope.push_back((gained[k] - gained[k + 1]) / (radii[k] - radii[k + 1]));
  }
  return extrapolate_to_zero(mid, slope, 2);
}

std::size_t DensityClassification::count(DensityLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> DensityClassification::essential_boundary() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != DensityLabel::exterior && labels[i] != DensityLabel::interior) out.push_back(i);
  }
  return out;
}

std::vector<double> default_density_schedule(const UniformGrid& grid) {
  const double h2 = grid.spacing() * grid.spacing();
  return {512.0 * h2, 256.0 * h2, 128.0 * h2, 64.0 * h2, 32.0 * h2};
}

DensityClassification density_classify(const IndicatorSet& e, const std::vector<double>& schedule,
                                       bool use_ou) {
  validate_schedule(schedule, 0.0, "density_classify", 3);
  constexpr double kTol = 0.05;
  DensityClassification out;
  out.schedule = schedule;
  out.ornstein_uhlenbeck = use_ou;
  const std::size_t n = e.membership().size();
  std::vector<std::vector<double>> tail;
  for (std::size_t k = schedule.size() - 3; k < schedule.size(); ++k) {
    const GridField v = use_ou ? ou_apply(e.membership(), schedule[k])
                               : heat_apply(e.membership(), schedule[k]);
    tail.push_back(v.values());
  }
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto all_near = [&](double target) {
      return std::all_of(tail.begin(), tail.end(),
                         [&](const std::vector<double>& v) { return std::abs(v[i] - target) <= kTol; });
    };
    if (all_near(1.0)) {
      out.labels[i] = DensityLabel::interior;
    } else if (all_near(0.0)) {
      out.labels[i] = DensityLabel::exterior;
    } else if (all_near(0.5)) {
      out.labels[i] = DensityLabel::half;
    } else {
      out.labels[i] = DensityLabel::unresolved;
    }
  }
  return out;
}

HVectorField approximate_normal(const IndicatorSet& e, double t) {
  HVectorField g = ou_gradient(e.membership(), t);
  const std::vector<double> norms = h_norms(g);
  const double peak = *std::max_element(norms.begin(), norms.end());
  for (int j = 0; j < g.dim(); ++j) {
    auto& c = g.component(j);
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = norms[i] > 1e-12 * peak && peak > 0.0 ? c[i] / norms[i] : 0.0;
    }
  }
  return g;
}

std::vector<double> default_coarea_levels(const GridField& u, int count) {
  if (count < 2) throw DomainError("default_coarea_levels: need at least two levels");
  const auto& w = u.space().weights();
  std::vector<std::size_t> order(u.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  double total = 0.0;
  for (double x : w) total += x;
  auto quantile = [&](double p) {
    double cum = 0.0;
    for (std::size_t i : order) {
      cum += w[i];
      if (cum >= p * total) return u[i];
    }
    return u[order.back()];
  };
  const double lo = quantile(0.001);
  const double hi = quantile(0.999);
  std::vector<double> levels(count);
  for (int k = 0; k < count; ++k) levels[k] = lo + (hi - lo) * k / (count - 1);
  return levels;
}

CoareaCheck coarea_check(const GridField& u, const std::vector<double>& levels,
                         const std::vector<double>& schedule) {
  if (levels.size() < 2) throw DomainError("coarea_check: need at least two levels");
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k] < levels[k - 1]) throw DomainError("coarea_check: levels must be sorted");
  }
  CoareaCheck out;
  out.levels = levels;
  out.lhs = tv_semigroup(u, schedule);
  for (double level : levels) {
    std::vector<double> chi(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) chi[i] = u[i] > level ? 1.0 : 0.0;
    out.level_perimeters.push_back(tv_semigroup(GridField(u.domain(), std::move(chi)), schedule));
  }
  for (std::size_t k = 1; k < levels.size(); ++k) {
    out.rhs += 0.5 * (levels[k] - levels[k - 1]) * (out.level_perimeters[k] + out.level_perimeters[k - 1]);
  }
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.gap = scale > 1e-12 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  out.pass = out.gap < 0.02;
  return out;
}

BoxPerimeterGrowth box_perimeter_growth(int m_max) {
  if (m_max < 1 || m_max > 25) throw DomainError("box_perimeter_growth: m_max must be in [1, 25]");
  BoxPerimeterGrowth out;
  const double log_c = 0.5 * std::log(2.0 / std::numbers::pi);
  for (int i = 1; i <= m_max; ++i) {
    const double k = i + 1.0;
    const double log_rhs = -(std::log(k) + 1.5 * std::log(std::log(k)));
    // log(sqrt(2/pi) e^{-r^2/2} / r) - log_rhs, strictly decreasing in r.
    auto f = [&](double r) {
      return std::make_pair(log_c - 0.5 * r * r - std::log(r) - log_rhs, -r - 1.0 / r);
    };
    const double guess = std::sqrt(std::max(1.0, 2.0 * (log_c - log_rhs)));
    std::uintmax_t iters = 100;
    const double r = boost::math::tools::newton_raphson_iterate(f, guess, 1e-8, 40.0, 52, iters);
    out.radii.push_back(r);
  }
  for (int m = 1; m <= m_max; ++m) {
    double p = 0.0;
    for (int i = 0; i < m; ++i) {
      double prod = 2.0 * normal_pdf(out.radii[i]);
      for (int j = 0; j < m; ++j) {
        if (j != i) prod *= std::erf(out.radii[j] / std::numbers::sqrt2);
      }
      p += prod;
    }
    out.perimeters.push_back(p);
  }
  out.increasing = true;
  for (std::size_t m = 1; m < out.perimeters.size(); ++m) {
    if (!(out.perimeters[m] > out.perimeters[m - 1])) out.increasing = false;
  }
  return out;
}

SobolevIsoperimetricCheck sobolev_isoperimetric_check(const GridField& u) {
  SobolevIsoperimetricCheck out;
  out.lhs = integrate_h_norm(gradient(u));
  const auto& w = u.space().weights();
  std::vector<std::pair<double, double>> pts(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) pts[i] = {std::abs(u[i]), w[i]};
  std::sort(pts.begin(), pts.end());
  // gamma(|u| > s) is a step function of s; integrate U of it exactly.
  std::vector<double> tail(pts.size() + 1, 0.0);
  for (std::size_t k = pts.size(); k-- > 0;) tail[k] = tail[k + 1] + pts[k].second;
  double prev = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double gap = pts[k].first - prev;
    if (gap > 0.0) out.rhs += gap * isoperimetric_profile(std::clamp(tail[k], 0.0, 1.0));
    prev = pts[k].first;
  }
  out.pass = out.lhs >= out.rhs * (1.0 - 0.02);
  return out;
}

std::vector<double> ball_perimeter_profile(DomainPtr domain, const Vector& center,
                                           const std::vector<double>& radii,
                                           const std::vector<double>& schedule) {
  std::vector<double> out;
  for (double r : radii) {
    out.push_back(tv_semigroup(IndicatorSet::ball(domain, center, r).membership(), schedule));
  }
  return out;
}

}  // namespace gaussbv
