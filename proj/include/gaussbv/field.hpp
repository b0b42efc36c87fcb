#pragma once

#include "gaussbv/grid.hpp"

#include <functional>
#include <span>
#include <vector>

namespace gaussbv {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Scalar function sampled at the nodes of a GaussianGrid.
class GridField {
 public:
  GridField(DomainPtr domain, std::vector<double> values);

  static GridField from_function(DomainPtr domain, const ScalarFunction& f);
  static GridField constant(DomainPtr domain, double c);

  const DomainPtr& domain() const noexcept { return domain_; }
  const GaussianGrid& space() const noexcept { return *domain_; }
  const UniformGrid& grid() const noexcept { return domain_->grid(); }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  GridField plus(double c) const;
  GridField scaled(double c) const;
  GridField minus(const GridField& other) const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

/// H-valued field stored by its coordinates in the standard basis e_j of
/// R^d (the truncated Cameron-Martin space). |v|_H^2 = v^T Q^{-1} v.
class HVectorField {
 public:
  HVectorField(DomainPtr domain, std::vector<std::vector<double>> components);
  static HVectorField zero(DomainPtr domain);

  const DomainPtr& domain() const noexcept { return domain_; }
  int dim() const noexcept { return static_cast<int>(components_.size()); }
  std::size_t size() const noexcept { return domain_->size(); }
  const std::vector<double>& component(int j) const noexcept { return components_[j]; }
  std::vector<double>& component(int j) noexcept { return components_[j]; }
  GridField component_field(int j) const { return GridField(domain_, components_[j]); }

 private:
  DomainPtr domain_;
  std::vector<std::vector<double>> components_;
};

/// Absolutely continuous part plus singular atoms of an H-valued measure:
/// D u = ac_part * gamma + sum_k mass_k * direction_k.
struct SingularAtom {
  double mass = 0.0;
  Vector direction;  // unit in |.|_H
};

struct HMeasureDecomposition {
  HVectorField ac_part;
  std::vector<SingularAtom> singular;

  double singular_mass() const;
};

enum class DifferenceScheme {
  central2,  // 3-point central, 2nd-order one-sided ends
  central4,  // 5-point central, 4th-order one-sided ends; exact on quartics
};

/// First-derivative matrix on one grid line.
LineOperator derivative_operator(int n, double h, DifferenceScheme scheme);

/// Euclidean partial derivative d/dx_axis at every node.
std::vector<double> partial_derivative(const GridField& u, int axis,
                                       DifferenceScheme scheme = DifferenceScheme::central2);

/// H-gradient Q grad u.
HVectorField gradient(const GridField& u, DifferenceScheme scheme = DifferenceScheme::central2);

/// d_j phi - phi * h_hat_j, the Gaussian adjoint of the partial derivative.
GridField adjoint_derivative(const GridField& phi, int axis,
                             DifferenceScheme scheme = DifferenceScheme::central2);

/// sum_j adjoint_derivative(Phi_j, j).
GridField divergence_H(const HVectorField& phi,
                       DifferenceScheme scheme = DifferenceScheme::central2);

/// Exact discrete adjoint of the central2 gradient under the weighted
/// pairing: sum_i w_i u_i div(Phi)_i = -sum_i w_i <grad u, Phi>_H,i for all
/// u. Agrees with divergence_H up to O(h^2) in the interior.
GridField discrete_divergence(const HVectorField& phi);

double integrate(const GridField& u);
double integrate_h_norm(const HVectorField& v);
std::vector<double> h_norms(const HVectorField& v);

/// A_{1/2}(t) = int_0^t sqrt(log(1 + s)) ds.
double a_half(double t);
/// int A_{1/2}(|u|) d(gamma).
double llogl_gauge(const GridField& u);

/// Multilinear interpolation with constant extension outside the box.
double interpolate(const GridField& u, std::span<const double> x);

}  // namespace gaussbv
