#pragma once

#include "gaussbv/field.hpp"

#include <string>
#include <vector>

namespace gaussbv {

/// How the Gaussian kernel integral against off-grid values is evaluated.
/// Both treat the field as its multilinear interpolant with constant
/// extension outside the box.
enum class KernelIntegration {
  /// Integrates the piecewise-linear interpolant against the kernel in
  /// closed form. Stays accurate for indicator fields.
  exact_interpolant,
  /// Tensor Gauss-Hermite rule over the kernel variable. Spectral on smooth
  /// fields, poor across jumps.
  gauss_hermite,
};

struct SemigroupParams {
  double t = 0.0;
  KernelIntegration integration = KernelIntegration::exact_interpolant;
  int gh_level = 32;
};

/// 1-D operator evaluating, at each grid node x_i,
///   int v(alpha x_i + shift + beta y) m(y) dphi(y)
/// for the interpolant v of the line values, with m(y) = 1, or with
/// m(y) = (alpha / beta) y when `derivative` is set (the x-derivative of
/// the same integral).
LineOperator gaussian_kernel_operator(const std::vector<double>& nodes, double alpha,
                                      double shift, double beta, bool derivative,
                                      KernelIntegration integration = KernelIntegration::exact_interpolant,
                                      int gh_level = 32);

/// The 1-D Mehler kernel of axis j at time t > 0 (its x-derivative when
/// `derivative` is set). Requires diagonal covariance.
LineOperator ou_line_operator(const GaussianGrid& space, int axis, const SemigroupParams& params,
                              bool derivative);

/// Ornstein-Uhlenbeck semigroup (Mehler formula) for the grid measure
/// N(a, Q), Q diagonal:
///   T_t u(x) = int u(a + e^{-t}(x - a) + sqrt(1 - e^{-2t})(y - a)) dgamma(y).
GridField ou_apply(const GridField& u, const SemigroupParams& params);
GridField ou_apply(const GridField& u, double t);

/// H-gradient of T_t u, differentiating the kernel rather than the values.
HVectorField ou_gradient(const GridField& u, const SemigroupParams& params);
HVectorField ou_gradient(const GridField& u, double t);

/// Heat semigroup W_t: convolution with N(0, t I). Requires t > 0, or
/// t == 0 with allow_zero. Below t = h^2 the kernel is not resolved by the
/// grid; the field is returned unchanged and a warning is emitted.
GridField heat_apply(const GridField& u, double t, bool allow_zero = false);

/// int |grad_H T_t u - e^{-t} T_t grad_H u|_H dgamma. The right-hand
/// gradient uses the given difference scheme; the default 4th-order scheme
/// is exact on polynomials of degree <= 4.
double commutation_residual(const GridField& u, double t,
                            DifferenceScheme scheme = DifferenceScheme::central4);

/// c_t = sqrt(2/pi) int_0^t e^{-s} / sqrt(1 - e^{-2s}) ds.
double ou_l1_constant(double t);

struct L1BoundCheck {
  double lhs = 0.0;     // int |T_t chi_E - chi_E| dgamma
  double c_t = 0.0;
  double perimeter = 0.0;
  bool pass = false;    // lhs <= c_t P (1 + 2%)
};

/// Short-time L1 bound for an indicator field given its perimeter.
L1BoundCheck ou_l1_bound_check(const GridField& indicator, double t, double perimeter);

}  // namespace gaussbv
