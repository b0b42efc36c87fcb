#pragma once

#include "gaussbv/field.hpp"
#include "gaussbv/semigroup.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gaussbv {

/// Set E stored through its 0/1 membership field chi_E on the grid nodes.
/// The boundary is resolved only to grid resolution.
class IndicatorSet {
 public:
  IndicatorSet(GridField membership, std::string description);

  static IndicatorSet from_predicate(DomainPtr domain,
                                     const std::function<bool(std::span<const double>)>& inside,
                                     std::string description);
  /// {x : <x, normal> > offset}.
  static IndicatorSet halfspace(DomainPtr domain, const Vector& normal, double offset);
  /// Open Euclidean ball.
  static IndicatorSet ball(DomainPtr domain, const Vector& center, double radius);
  /// prod_j [-half_widths_j, half_widths_j].
  static IndicatorSet box(DomainPtr domain, const Vector& half_widths);
  static IndicatorSet whole(DomainPtr domain);
  static IndicatorSet empty(DomainPtr domain);

  const GridField& membership() const noexcept { return membership_; }
  const std::string& description() const noexcept { return description_; }
  const DomainPtr& domain() const noexcept { return membership_.domain(); }

  /// gamma(E).
  double volume() const { return integrate(membership_); }

 private:
  GridField membership_;
  std::string description_;
};

/// Default short-time schedule for the semigroup routes.
std::vector<double> default_time_schedule();

/// Smallest admissible schedule time on a grid: (2h)^2.
double time_floor(const UniformGrid& grid);

/// Least-squares polynomial fit of values against abscissae, evaluated at 0.
/// Degree is capped at points - 1.
double extrapolate_to_zero(const std::vector<double>& abscissae, const std::vector<double>& values,
                           int degree);

struct DualTVOptions {
  int iterations = 500;
  std::uint64_t seed = 0;
  double step_factor = 0.5;  // ascent step = step_factor * h
};

struct DualTVResult {
  double value = 0.0;
  std::vector<double> history;  // objective after each ascent step, nondecreasing
};

/// sup { int u div_H Phi dgamma : |Phi|_H <= 1 } for the multilinear
/// interpolant of u, in the weak form -int <grad_H u, Phi>_H dgamma with Phi
/// sampled at two Gauss-Legendre points per cell axis. Projected ascent
/// from the smoothed gradient direction; every iterate is feasible, so each
/// value is a lower bound of the supremum.
DualTVResult tv_dual_detailed(const GridField& u, const DualTVOptions& options = {});
double tv_dual(const GridField& u, int iterations = 500, std::uint64_t seed = 0);

struct ScheduleTV {
  double value = 0.0;           // extrapolated to t = 0
  std::vector<double> times;
  std::vector<double> raw;      // per schedule point
  bool monotone = false;        // raw nondecreasing as t decreases
};

/// lim_{t -> 0} int |grad_H T_t u|_H dgamma, gradients from the Mehler
/// kernel derivative, extrapolated to t = 0 by a quadratic in t through the
/// three smallest schedule times. Exact in the limit for smooth boundaries;
/// corners add sqrt(t) terms and read low by about 2% at the default schedule.
ScheduleTV tv_semigroup_detailed(const GridField& u, const std::vector<double>& schedule);
double tv_semigroup(const GridField& u, const std::vector<double>& schedule = default_time_schedule());

/// Relaxation route: smooth with u_n = T_{t_n} u, take finite-difference
/// gradients of the smoothed values, extrapolate as above.
ScheduleTV tv_relaxation_detailed(const GridField& u, const std::vector<double>& schedule);
double tv_relaxation(const GridField& u, const std::vector<double>& schedule = default_time_schedule());

/// int |grad_H u|_H dgamma for smooth u. Throws DomainError when u is an
/// indicator field (values in {0,1}, both present).
double tv_smooth(const GridField& u);

/// Total variation along the axis direction nu (|nu|_H = 1, nu = +-e_j up
/// to scale): exact 1-D dual TV along each grid line parallel to e_j,
/// integrated over the orthogonal slices.
double tv_directional(const GridField& u, const Vector& nu);

struct SlicingCheck {
  double lhs = 0.0;  // tv_directional
  double rhs = 0.0;  // int V_{gamma_1}(u_y) dgamma^perp(y), slices by the 1-D semigroup route
  bool pass = false;
};

SlicingCheck slicing_check(const GridField& u, int axis,
                           const std::vector<double>& schedule = default_time_schedule());

struct TVReport {
  double tv_dual = 0.0;
  double tv_semigroup = 0.0;
  double tv_relaxation = 0.0;
  std::optional<double> tv_smooth;
  double spread = 0.0;  // max pairwise relative deviation of present entries
};

double relative_spread(const std::vector<double>& values);

struct BVOptions {
  std::vector<double> schedule = default_time_schedule();
  DualTVOptions dual;
};

/// All applicable routes on one field. tv_smooth is included only when
/// `smooth` is set.
TVReport tv_report(const GridField& u, bool smooth, const BVOptions& options = {});

/// P_gamma(E): the TV routes on chi_E, reported value = tv_semigroup.
TVReport perimeter(const IndicatorSet& e, const BVOptions& options = {});

struct IsoperimetricCheck {
  double perimeter = 0.0;
  double volume = 0.0;
  double profile = 0.0;  // U(gamma(E))
  bool pass = false;     // perimeter >= profile (1 - 2%)
  bool equality = false; // |perimeter - profile| <= 2% profile
};

IsoperimetricCheck isoperimetric_check(const IndicatorSet& e, const BVOptions& options = {});

/// Gaussian Minkowski content lim (gamma(E_r) - gamma(E)) / r, with E_r the
/// Euclidean r-dilation of the member cells. Quotients of gained mass between
/// consecutive radii are extrapolated to r = 0 by a quadratic.
double minkowski_content(const IndicatorSet& e, const std::vector<double>& radii);
/// Default radii 10h, 9.5h, ..., 2h.
std::vector<double> default_minkowski_radii(const UniformGrid& grid);

enum class DensityLabel { exterior, interior, half, unresolved };  // E^0, E^1, E^{1/2}

struct DensityClassification {
  std::vector<DensityLabel> labels;
  std::vector<double> schedule;
  bool ornstein_uhlenbeck = false;

  std::size_t count(DensityLabel label) const;
  /// Nodes outside E^0 and E^1.
  std::vector<std::size_t> essential_boundary() const;
};

/// Labels each node by the limit of W_t chi_E (or T_t chi_E when
/// `use_ou`) over the last three schedule points, within 0.05 of 0, 1 or 1/2.
DensityClassification density_classify(const IndicatorSet& e, const std::vector<double>& schedule,
                                       bool use_ou = false);
/// {512, 256, 128, 64, 32} h^2, coarse enough that a node on a flat
/// boundary reads within 0.05 of 1/2.
std::vector<double> default_density_schedule(const UniformGrid& grid);

/// Unit direction of the smoothed gradient of chi_E (zero where it
/// vanishes). Diagnostic approximation of the measure-theoretic normal.
HVectorField approximate_normal(const IndicatorSet& e, double t);

struct CoareaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<double> levels;
  std::vector<double> level_perimeters;
  double gap = 0.0;
  bool pass = false;  // gap < 2%
};

/// 64 (by default) equispaced levels between the 0.1% and 99.9% gamma-quantiles of u.
std::vector<double> default_coarea_levels(const GridField& u, int count = 64);

CoareaCheck coarea_check(const GridField& u, const std::vector<double>& levels,
                         const std::vector<double>& schedule = default_time_schedule());

struct BoxPerimeterGrowth {
  std::vector<double> radii;       // r_1..r_m
  std::vector<double> perimeters;  // P(Q_1)..P(Q_m)
  bool increasing = false;
};

/// Half-widths r_i solving sqrt(2/pi) e^{-r^2/2} / r = 1 / ((i+1) log(i+1)^{3/2})
/// and the perimeters of the boxes Q_m = prod_{i<=m} [-r_i, r_i].
BoxPerimeterGrowth box_perimeter_growth(int m_max);

struct SobolevIsoperimetricCheck {
  double lhs = 0.0;  // int |grad_H u|_H
  double rhs = 0.0;  // int_0^inf U(gamma(|u| > s)) ds
  bool pass = false;
};

SobolevIsoperimetricCheck sobolev_isoperimetric_check(const GridField& u);

/// P(B_r(center)) for each r, the d = 2 ball perimeter profile g(r).
std::vector<double> ball_perimeter_profile(DomainPtr domain, const Vector& center,
                                           const std::vector<double>& radii,
                                           const std::vector<double>& schedule = default_time_schedule());

}  // namespace gaussbv
