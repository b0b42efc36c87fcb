#pragma once

#include "gaussbv/bv.hpp"
#include "gaussbv/field.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gaussbv {

/// Returned by conjugates and recession functions where they are infinite.
inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

/// Growth of F at infinity. Superlinear integrands carry the p-growth
/// constants alpha1 |h|^p - beta1 <= F(h) <= alpha2 |h|^p + beta2.
struct GrowthTag {
  enum class Kind { linear, p_growth } kind = Kind::linear;
  double p = 1.0;
  double alpha1 = 0.0, beta1 = 0.0, alpha2 = 0.0, beta2 = 0.0;
};

/// Convex integrand on H. Arguments are coordinates in an orthonormal basis
/// of H (whitened coordinates), so [Phi, h]_H is the Euclidean dot product.
struct ConvexIntegrand {
  using Evaluator = std::function<double(const Vector&)>;
  /// prox_{sigma F*}(v).
  using Prox = std::function<Vector(const Vector&, double)>;

  std::string name;
  Evaluator value;
  std::optional<Evaluator> conjugate_analytic;
  std::optional<Evaluator> recession_analytic;
  std::optional<Prox> conjugate_prox;
  GrowthTag growth;

  /// F(h) = |h|_H.
  static ConvexIntegrand norm();
  /// F(h) = |h|_H^2 / 2.
  static ConvexIntegrand half_squared();
  /// F(h) = sqrt(1 + |h|_H^2).
  static ConvexIntegrand area();
  /// F = 0.
  static ConvexIntegrand zero();
};

/// F*(Phi): the analytic conjugate when present, otherwise
/// conjugate_numeric. kPlusInfinity where the supremum is unbounded.
double conjugate(const ConvexIntegrand& f, const Vector& phi);
/// sup_h [Phi, h] - F(h) over a ball whose radius follows the growth tag:
/// coarse grid, then pattern search. For linear growth the supremum is
/// compared on radii R and 2R; growth with R reports kPlusInfinity.
double conjugate_numeric(const ConvexIntegrand& f, const Vector& phi);

/// F^inf(h) = lim F(t h) / t, analytic when present.
double recession(const ConvexIntegrand& f, const Vector& h);
/// F(t e) / t at t = 10, 100, 1000 for e = h / |h|, extrapolated in 1/t and
/// scaled by |h|. kPlusInfinity when the quotient keeps growing.
double recession_numeric(const ConvexIntegrand& f, const Vector& h);

/// Coordinates of grad_H u in an orthonormal basis of H: L^T grad u.
std::vector<std::vector<double>> whitened_gradient(const GridField& u,
                                                   DifferenceScheme scheme = DifferenceScheme::central2);

/// int F(grad_H u) dgamma.
double functional_eval(const ConvexIntegrand& f, const GridField& u);
/// int F(ac) dgamma + sum_k mass_k F^inf(direction_k). Throws DomainError
/// when F^inf is infinite on a singular direction with positive mass.
double functional_eval(const ConvexIntegrand& f, const HMeasureDecomposition& decomposition);
/// sup over nodewise Phi of int (-<grad_H u, Phi> - F*(Phi)) dgamma, i.e.
/// int (u div_H Phi - F*(Phi)) with the exact discrete adjoint, by proximal
/// ascent. Throws UnsupportedError without a conjugate prox.
double functional_eval_dual(const ConvexIntegrand& f, const GridField& u, int iterations = 200);

struct VariationalSolution {
  GridField minimizer;
  double objective = 0.0;       // primal value at the minimizer
  double dual_objective = 0.0;  // best dual bound
  double gap = 0.0;             // objective - dual_objective
  int iterations = 0;
  std::vector<double> objective_trace;  // best primal value so far, per iteration
};

struct RofOptions {
  double tol = 1e-7;
  int max_iters = 20000;
  std::optional<GridField> initial;  // defaults to g
};

/// argmin_u int F(grad_H u) dgamma + 1/2 int (u - g)^2 dgamma by the
/// accelerated primal-dual method in the gamma-weighted metric. The gradient
/// is taken by forward differences weighted with cell masses (central
/// differences would leave the odd-even mode unpenalized), paired with its
/// exact discrete adjoint. Stops when the duality gap is
/// below tol; throws ConvergenceError carrying the last gap otherwise.
VariationalSolution rof_minimize(const ConvexIntegrand& f, const GridField& g, const RofOptions& options = {});
VariationalSolution rof_minimize(const ConvexIntegrand& f, const GridField& g, double tol, int max_iters);

/// Operator norm of the discrete H-gradient in the weighted metric, by
/// power iteration on K^T K.
double gradient_operator_norm(const DomainPtr& domain, int iterations = 100);

struct ConvexityCheck {
  double min_second_difference = 0.0;
  double tol = 0.0;  // 10 h^2 max |u|
  bool pass = false;
};

/// Second differences along every axis and, for d = 2, both diagonals.
ConvexityCheck convexity_check(const GridField& u);
/// Same, using only stencils inside the box |x_j| <= core_radius.
ConvexityCheck convexity_check(const GridField& u, double core_radius);

struct LevelSetReport {
  double t = 0.0;
  double value = 0.0;  // P(E) - int_E (g - t) dgamma at E = {u > t}
  double best_competitor_value = 0.0;
  std::string best_competitor;
  double tolerance = 0.0;
  bool pass = false;    // value <= best_competitor_value + tolerance
  bool empty = false;
  bool convex = false;  // interval (d = 1), row- and column-convex (d = 2)
};

struct LevelSetOptions {
  double rof_tol = 1e-7;
  int rof_max_iters = 20000;
  std::vector<double> schedule = default_time_schedule();
};

/// Checks the level sets of the Gaussian ROF minimizer (F = |h|) against
/// dilations and erosions by 1 to 3 cells and nearby threshold sets.
/// Requires convex g.
std::vector<LevelSetReport> geometric_levelset_check(const GridField& g, const std::vector<double>& t_levels,
                                                     const LevelSetOptions& options = {});

/// F_{g - t}(E) = P(E) - int_E (g - t) dgamma.
double geometric_functional(const IndicatorSet& e, const GridField& g, double t,
                            const std::vector<double>& schedule = default_time_schedule());

enum class RangeConvention {
  unit,    // u in [0, 1]
  signed_  // u in [-1, 1], mapped to (u + 1) / 2
};

struct RelaxedPerimeter {
  double primal = 0.0;
  double dual = 0.0;
  bool indicator = false;
};

/// int sqrt(U(v)^2 + |grad_H v|^2) dgamma for the normalized v in [0, 1];
/// for indicator fields this is P(E) (U vanishes at 0 and 1), taken from
/// the semigroup route. The dual path maximizes int (v div_H Phi + U(v) xi)
/// over |Phi|_H^2 + xi^2 <= 1 by projected ascent. Throws DomainError when
/// |u| exceeds the range.
RelaxedPerimeter relaxed_perimeter_detailed(const GridField& u, RangeConvention convention = RangeConvention::unit,
                                            int dual_iterations = 500);
double relaxed_perimeter(const GridField& u, RangeConvention convention = RangeConvention::unit);

struct WeakLscWitness {
  std::vector<double> perimeters;  // P(E_n), E_n = {x_{n mod d} < 0}
  double limit_relaxed = 0.0;      // relaxed perimeter of the constant 1/2
  bool limit_is_indicator = false;
};

WeakLscWitness weak_lsc_witness(const DomainPtr& domain, int n_sets,
                                const std::vector<double>& schedule = default_time_schedule());

}  // namespace gaussbv
