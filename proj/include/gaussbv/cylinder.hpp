#pragma once

#include "gaussbv/field.hpp"

#include <cstdint>

namespace gaussbv {

/// Retain the first m coordinates of a d-dimensional grid, gamma = gamma_m x gamma_perp.
struct CylinderProjection {
  int m = 1;
  int total_dim = 1;

  CylinderProjection(int retained, int dim);
};

/// E_m u(x) = int u(P_m x + (I - P_m) y) dgamma(y): integrates out axes
/// m+1..d against their marginals. Constant along the integrated axes.
/// Requires diagonal covariance.
GridField conditional_expectation(const GridField& u, int m);
GridField conditional_expectation(const GridField& u, const CylinderProjection& p);

struct TowerCheck {
  double residual = 0.0;  // max |E_m E_n u - E_m u|
  bool pass = false;      // residual <= 1e-8
};

TowerCheck tower_check(const GridField& u, int m, int n);

struct MonotonicityCheck {
  double lhs = 0.0;  // int |grad_H T_t E_m u|_H
  double rhs = 0.0;  // int |grad_H T_t u|_H
  bool pass = false; // lhs <= rhs (1 + 1%)
};

MonotonicityCheck monotonicity_check(const GridField& u, int m, double t);

struct RotationCheck {
  double lhs = 0.0;        // Monte Carlo mean of u(cos(theta) x + sin(theta) y)
  double rhs = 0.0;        // int u dgamma by grid quadrature
  double std_error = 0.0;  // sample std / sqrt(n)
  bool pass = false;       // |lhs - rhs| < 4 std_error
};

/// x and y are independent draws from the (centered) grid measure; u is
/// evaluated by multilinear interpolation.
RotationCheck rotation_invariance_check(const GridField& u, double theta, std::size_t n_mc,
                                        std::uint64_t seed);

}  // namespace gaussbv
