#include "gaussbv/wiener_mc.hpp"

#include "gaussbv/errors.hpp"
#include "gaussbv/parallel.hpp"
#include "gaussbv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace gaussbv {

namespace {

constexpr std::uint64_t kBridgeStream = 0x6d61785f62726467ULL;

void check_steps(std::size_t n_paths, std::size_t n_steps) {
  if (n_steps < 2) throw DomainError("path sampling: n_steps must be at least 2");
  if (n_paths < 1) throw DomainError("path sampling: need at least one path");
}

void check_dim(const Vector& a) {
  if (a.size() < 1 || a.size() > 2) throw DomainError("path sampling: dimension must be 1 or 2");
}

Vector scalar(double x) {
  Vector v(1);
  v(0) = x;
  return v;
}

}  // namespace

PathEnsemble::PathEnsemble(PathKind kind, std::size_t n_paths, std::size_t n_steps, Vector start,
                           std::optional<Vector> pin, std::uint64_t seed)
    : kind_(kind), n_paths_(n_paths), n_steps_(n_steps), start_(std::move(start)),
      pin_(std::move(pin)), seed_(seed) {
  check_steps(n_paths, n_steps);
  check_dim(start_);
  if ((kind_ == PathKind::pinned) != pin_.has_value()) {
    throw DomainError("PathEnsemble: a pin is required exactly for pinned ensembles");
  }
  if (pin_ && pin_->size() != start_.size()) throw DomainError("PathEnsemble: pin dimension mismatch");
}

std::vector<double> PathEnsemble::path(std::size_t i) const {
  if (i >= n_paths_) throw DomainError("PathEnsemble::path: index out of range");
  const int d = dim();
  const std::size_t n = n_steps_;
  const double dt = this->dt();
  auto engine = make_engine(seed_, i);
  std::normal_distribution<double> normal;
  std::vector<double> v((n + 1) * d);
  for (int j = 0; j < d; ++j) v[j] = start_(j);

  if (kind_ == PathKind::ornstein_uhlenbeck) {
    const double decay = std::exp(-0.5 * dt);
    const double noise = std::sqrt(-std::expm1(-dt));
    for (std::size_t k = 0; k < n; ++k) {
      for (int j = 0; j < d; ++j) v[(k + 1) * d + j] = decay * v[k * d + j] + noise * normal(engine);
    }
    return v;
  }

  const double sd = std::sqrt(dt);
  for (std::size_t k = 0; k < n; ++k) {
    for (int j = 0; j < d; ++j) v[(k + 1) * d + j] = v[k * d + j] + sd * normal(engine);
  }
  if (kind_ == PathKind::pinned) {
    // X_t = W_t - t (W_1 - b), with W started at a.
    for (int j = 0; j < d; ++j) {
      const double gap = v[n * d + j] - (*pin_)(j);
      for (std::size_t k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        v[k * d + j] -= t * gap;
      }
      v[n * d + j] = (*pin_)(j);
    }
  }
  return v;
}

void PathEnsemble::for_each_path(
    const std::function<void(std::size_t, const std::vector<double>&)>& f) const {
#pragma omp parallel for num_threads(worker_count()) schedule(dynamic, 64)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n_paths_); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    f(i, path(i));
  }
}

std::vector<double> PathEnsemble::marginal(double t, int component) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("marginal: t must lie in [0, 1]");
  if (component < 0 || component >= dim()) throw DomainError("marginal: component out of range");
  const auto k = static_cast<std::size_t>(std::llround(t * static_cast<double>(n_steps_)));
  std::vector<double> out(n_paths_);
  const int d = dim();
  for_each_path([&](std::size_t i, const std::vector<double>& v) { out[i] = v[k * d + component]; });
  return out;
}

PathEnsemble sample_brownian(std::size_t n_paths, std::size_t n_steps, const Vector& a,
                             std::uint64_t seed) {
  return PathEnsemble(PathKind::brownian, n_paths, n_steps, a, std::nullopt, seed);
}

PathEnsemble sample_brownian(std::size_t n_paths, std::size_t n_steps, double a, std::uint64_t seed) {
  return sample_brownian(n_paths, n_steps, scalar(a), seed);
}

PathEnsemble sample_pinned(std::size_t n_paths, std::size_t n_steps, const Vector& a,
                           const Vector& b, std::uint64_t seed) {
  return PathEnsemble(PathKind::pinned, n_paths, n_steps, a, b, seed);
}

PathEnsemble sample_pinned(std::size_t n_paths, std::size_t n_steps, double a, double b,
                           std::uint64_t seed) {
  return sample_pinned(n_paths, n_steps, scalar(a), scalar(b), seed);
}

PathEnsemble ou_process(std::size_t n_paths, std::size_t n_steps, double x0, std::uint64_t seed) {
  return PathEnsemble(PathKind::ornstein_uhlenbeck, n_paths, n_steps, scalar(x0), std::nullopt, seed);
}

void write_ensemble_csv(std::ostream& out, const PathEnsemble& e, std::size_t max_paths) {
  const int d = e.dim();
  out << "path_id,t";
  if (d == 1) {
    out << ",value\n";
  } else {
    out << ",value_1,value_2\n";
  }
  out.precision(std::numeric_limits<double>::max_digits10);
  const std::size_t count = std::min(max_paths, e.n_paths());
  for (std::size_t i = 0; i < count; ++i) {
    const auto v = e.path(i);
    for (std::size_t k = 0; k <= e.n_steps(); ++k) {
      out << i << ',' << static_cast<double>(k) * e.dt();
      for (int j = 0; j < d; ++j) out << ',' << v[k * d + j];
      out << '\n';
    }
  }
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

SampleStats sample_stats(const std::vector<double>& x) {
  SampleStats s;
  s.n = x.size();
  if (s.n == 0) return s;
  const double n = static_cast<double>(s.n);
  s.mean = pairwise_sum(x.data(), x.size()) / n;
  if (s.n < 2) return s;
  std::vector<double> dev2(x.size());
  std::vector<double> dev4(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - s.mean;
    dev2[i] = d * d;
    dev4[i] = dev2[i] * dev2[i];
  }
  const double m2 = pairwise_sum(dev2.data(), dev2.size()) / n;
  const double m4 = pairwise_sum(dev4.data(), dev4.size()) / n;
  s.variance = m2 * n / (n - 1.0);
  s.std_error = std::sqrt(s.variance / n);
  // Var(s^2) ~ (m4 - (n - 3) / (n - 1) m2^2) / n.
  s.variance_std_error = std::sqrt(std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n));
  return s;
}

RunningMaxStats running_max_stats(const PathEnsemble& e, const std::vector<double>& deltas) {
  if (e.kind() != PathKind::brownian) {
    throw DomainError("running_max_stats: needs an unpinned Brownian ensemble");
  }
  if (e.dim() != 1 || e.start()(0) != 0.0) {
    throw DomainError("running_max_stats: needs a one-dimensional ensemble started at 0");
  }
  for (double d : deltas) {
    if (!(d > 0.0)) throw DomainError("running_max_stats: deltas must be positive");
  }
  const std::size_t n = e.n_paths();
  const double dt = e.dt();
  std::vector<double> corrected(n);
  std::vector<double> plain(n);
  std::vector<std::vector<double>> doubles(deltas.size(), std::vector<double>(n, 0.0));
  e.for_each_path([&](std::size_t i, const std::vector<double>& v) {
    auto engine = make_engine(derive_seed(e.seed(), kBridgeStream), i);
    std::uniform_real_distribution<double> uniform;
    double m_plain = v[0];
    double m_bridge = v[0];
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double w0 = v[k];
      const double w1 = v[k + 1];
      m_plain = std::max(m_plain, w1);
      // Maximum of the Brownian bridge from w0 to w1 over one step.
      const double u = 1.0 - uniform(engine);  // (0, 1]
      const double diff = w1 - w0;
      const double step_max = 0.5 * (w0 + w1 + std::sqrt(diff * diff - 2.0 * dt * std::log(u)));
      m_bridge = std::max(m_bridge, step_max);
    }
    plain[i] = m_plain;
    corrected[i] = m_bridge;
    for (std::size_t q = 0; q < deltas.size(); ++q) {
      const double level = m_plain - deltas[q];
      int components = 0;
      bool above = false;
      for (double x : v) {
        const bool now = x >= level;
        if (now && !above) ++components;
        above = now;
      }
      doubles[q][i] = components >= 2 ? 1.0 : 0.0;
    }
  });

  RunningMaxStats out;
  out.corrected = sample_stats(corrected);
  out.uncorrected = sample_stats(plain);
  std::vector<double> exceed(n);
  for (std::size_t i = 0; i < n; ++i) exceed[i] = corrected[i] > 1.0 ? 1.0 : 0.0;
  const SampleStats ex = sample_stats(exceed);
  out.exceed_one = ex.mean;
  out.exceed_one_std_error = ex.std_error;
  out.min_max = *std::min_element(corrected.begin(), corrected.end());
  out.deltas = deltas;
  for (const auto& d : doubles) out.double_max_fraction.push_back(pairwise_sum(d.data(), n) / n);
  return out;
}

DomainGeometry::DomainGeometry(int dim, Evaluator q, double reach)
    : dim_(dim), q_(std::move(q)), reach_(reach) {
  if (dim_ < 1 || dim_ > 2) throw DomainError("DomainGeometry: dimension must be 1 or 2");
  if (!(reach_ > 0.0)) throw DomainError("DomainGeometry: reach must be positive");
}

DomainGeometry DomainGeometry::interval(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("DomainGeometry::interval: need lo < hi");
  return DomainGeometry(
      1, [lo, hi](const Vector& x) { return std::min(x(0) - lo, hi - x(0)); },
      std::numeric_limits<double>::infinity());
}

DomainGeometry DomainGeometry::disk(const Vector& center, double radius) {
  if (center.size() != 2) throw DomainError("DomainGeometry::disk: center must be 2-D");
  if (!(radius > 0.0)) throw DomainError("DomainGeometry::disk: radius must be positive");
  return DomainGeometry(
      2, [center, radius](const Vector& x) { return radius - (x - center).norm(); },
      std::numeric_limits<double>::infinity());
}

DomainGeometry DomainGeometry::custom(int dim, Evaluator q, double reach, double box_radius) {
  DomainGeometry g(dim, std::move(q), reach);
  if (g.lipschitz_excess(box_radius, 2000, 0) > 1e-9) {
    throw DomainError("DomainGeometry::custom: signed distance is not 1-Lipschitz");
  }
  return g;
}

double DomainGeometry::lipschitz_excess(double box_radius, std::size_t pairs,
                                        std::uint64_t seed) const {
  auto engine = make_engine(seed, 0x4c6970);
  std::uniform_real_distribution<double> coord(-box_radius, box_radius);
  double worst = -1.0;
  Vector x(dim_), y(dim_);
  for (std::size_t p = 0; p < pairs; ++p) {
    for (int j = 0; j < dim_; ++j) {
      x(j) = coord(engine);
      y(j) = coord(engine);
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    worst = std::max(worst, std::abs(q_(x) - q_(y)) / dist - 1.0);
  }
  return worst;
}

std::vector<double> hino_uchida_functional(const DomainGeometry& domain, const PathEnsemble& e) {
  if (e.dim() != domain.dim()) throw DomainError("hino_uchida_functional: dimension mismatch");
  const int d = e.dim();
  std::vector<double> f(e.n_paths());
  e.for_each_path([&](std::size_t i, const std::vector<double>& v) {
    Vector x(d);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= e.n_steps(); ++k) {
      for (int j = 0; j < d; ++j) x(j) = v[k * d + j];
      lowest = std::min(lowest, domain.q(x));
    }
    f[i] = lowest;
  });
  return f;
}

std::vector<HinoUchidaPoint> hino_uchida_estimator(const DomainGeometry& domain,
                                                   const std::vector<int>& n_list,
                                                   const HinoUchidaParams& params) {
  if (params.a.size() != domain.dim() || params.b.size() != domain.dim()) {
    throw DomainError("hino_uchida_estimator: endpoint dimension mismatch");
  }
  if (!domain.contains(params.a) || !domain.contains(params.b)) {
    throw DomainError("hino_uchida_estimator: endpoints must lie inside the domain");
  }
  for (int n : n_list) {
    if (n < 1) throw DomainError("hino_uchida_estimator: n must be positive");
  }
  const PathEnsemble e = sample_pinned(params.n_paths, params.n_steps, params.a, params.b, params.seed);
  const std::vector<double> f = hino_uchida_functional(domain, e);
  std::vector<HinoUchidaPoint> out;
  for (int n : n_list) {
    std::vector<double> hit(f.size());
    const double width = 1.0 / n;
    for (std::size_t i = 0; i < f.size(); ++i) hit[i] = (f[i] >= 0.0 && f[i] <= width) ? 1.0 : 0.0;
    const SampleStats s = sample_stats(hit);
    out.push_back({n, n * s.mean, n * s.std_error});
  }
  return out;
}

}  // namespace gaussbv
