#pragma once

#include "gaussbv/gauss_core.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace gaussbv {

enum class PathKind { brownian, pinned, ornstein_uhlenbeck };

/// An ensemble of sampled paths on t_k = k / n_steps, k = 0..n_steps.
///
/// Paths are regenerated on demand from (seed, path index), so an ensemble
/// of 10^5 paths with 2^12 steps costs no storage and every path is
/// reproducible on its own.
class PathEnsemble {
 public:
  PathEnsemble(PathKind kind, std::size_t n_paths, std::size_t n_steps, Vector start,
               std::optional<Vector> pin, std::uint64_t seed);

  PathKind kind() const noexcept { return kind_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return 1.0 / static_cast<double>(n_steps_); }
  int dim() const noexcept { return static_cast<int>(start_.size()); }
  const Vector& start() const noexcept { return start_; }
  const std::optional<Vector>& pin() const noexcept { return pin_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Values of path i, point-major: entry k * dim + j is coordinate j at t_k.
  std::vector<double> path(std::size_t i) const;

  /// f(i, path) for every path, possibly concurrently; results must be
  /// written to per-path slots.
  void for_each_path(const std::function<void(std::size_t, const std::vector<double>&)>& f) const;

  /// Coordinate `component` of every path at the step nearest to t.
  std::vector<double> marginal(double t, int component = 0) const;

 private:
  PathKind kind_;
  std::size_t n_paths_;
  std::size_t n_steps_;
  Vector start_;
  std::optional<Vector> pin_;
  std::uint64_t seed_;
};

/// Brownian motion from a with i.i.d. N(0, dt) increments.
PathEnsemble sample_brownian(std::size_t n_paths, std::size_t n_steps, const Vector& a,
                             std::uint64_t seed);
PathEnsemble sample_brownian(std::size_t n_paths, std::size_t n_steps, double a, std::uint64_t seed);

/// Brownian bridge from a to b; every path ends exactly at b.
PathEnsemble sample_pinned(std::size_t n_paths, std::size_t n_steps, const Vector& a,
                           const Vector& b, std::uint64_t seed);
PathEnsemble sample_pinned(std::size_t n_paths, std::size_t n_steps, double a, double b,
                           std::uint64_t seed);

/// Exact discretization of d xi = -xi/2 dt + dB:
/// xi_{t+dt} = e^{-dt/2} xi_t + sqrt(1 - e^{-dt}) N(0, 1).
/// Process time 2t corresponds to the Mehler semigroup at time t.
PathEnsemble ou_process(std::size_t n_paths, std::size_t n_steps, double x0, std::uint64_t seed);

/// Writes `path_id,t,value` rows (`value_1,value_2` in dimension 2) for the
/// first max_paths paths.
void write_ensemble_csv(std::ostream& out, const PathEnsemble& e, std::size_t max_paths);

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased
  double std_error = 0.0;  // of the mean
  /// Standard error of the unbiased variance estimator.
  double variance_std_error = 0.0;
};

/// Mean and variance with fixed-order pairwise summation.
SampleStats sample_stats(const std::vector<double>& x);

/// Sum in a fixed pairwise order, independent of thread count.
double pairwise_sum(const double* x, std::size_t n);

struct RunningMaxStats {
  SampleStats corrected;    // M_1 with the within-step bridge maximum
  SampleStats uncorrected;  // max over grid times only
  double exceed_one = 0.0;  // fraction of corrected maxima > 1
  double exceed_one_std_error = 0.0;
  double min_max = 0.0;     // smallest corrected maximum over paths
  std::vector<double> deltas;
  /// Per delta, fraction of paths whose superlevel set {B >= M - delta}
  /// on the time grid has two or more components.
  std::vector<double> double_max_fraction;
};

/// M_1 = sup_{s <= 1} B_s. Requires an unpinned one-dimensional Brownian
/// ensemble started at 0.
RunningMaxStats running_max_stats(const PathEnsemble& e,
                                  const std::vector<double>& deltas = {0.1, 0.03, 0.01});

/// Signed distance q(x) = dist(x, complement) - dist(x, domain), positive inside.
class DomainGeometry {
 public:
  using Evaluator = std::function<double(const Vector&)>;

  static DomainGeometry interval(double lo, double hi);
  static DomainGeometry disk(const Vector& center, double radius);
  /// A user-supplied signed distance. Its Lipschitz constant is checked on
  /// random pairs in [-box_radius, box_radius]^dim.
  static DomainGeometry custom(int dim, Evaluator q, double reach, double box_radius = 4.0);

  int dim() const noexcept { return dim_; }
  double reach() const noexcept { return reach_; }
  double q(const Vector& x) const { return q_(x); }
  bool contains(const Vector& x) const { return q_(x) > 0.0; }

  /// max |q(x) - q(y)| / |x - y| - 1 over random pairs; <= 0 up to rounding.
  double lipschitz_excess(double box_radius, std::size_t pairs, std::uint64_t seed) const;

 private:
  DomainGeometry(int dim, Evaluator q, double reach);

  int dim_;
  Evaluator q_;
  double reach_;
};

struct HinoUchidaParams {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 4096;
  Vector a;
  Vector b;
  std::uint64_t seed = 0;
};

struct HinoUchidaPoint {
  int n = 0;
  double bound = 0.0;      // n P(0 <= F <= 1/n)
  double std_error = 0.0;
};

/// F(omega) = min over grid times of q(omega(t)) for every pinned path.
std::vector<double> hino_uchida_functional(const DomainGeometry& domain, const PathEnsemble& e);

std::vector<HinoUchidaPoint> hino_uchida_estimator(const DomainGeometry& domain,
                                                   const std::vector<int>& n_list,
                                                   const HinoUchidaParams& params);

}  // namespace gaussbv
