#pragma once

#include "dftr/model.hpp"
#include "dftr/tridiagonal.hpp"

#include <cstdint>

namespace dftr {

/// Finite-difference generator D_ax d^2/dx^2 - v d/dx on the closed domain
///
///   (1 - alpha) xi(0) = (D_ax / v) xi'(0),   xi'(l) = 0.
///
/// Interior rows are second-order central differences. Both boundary rows
/// collocate the equation at the end node and eliminate the ghost node through
/// a central difference of the boundary condition, so the closure is second
/// order as well.
class DiscreteGenerator {
 public:
  DiscreteGenerator(const SpatialGrid& grid, const ReactorParams& params, double alpha);

  const SpatialGrid& grid() const { return grid_; }
  const ReactorParams& params() const { return params_; }
  double alpha() const { return alpha_; }
  const Tridiagonal<double>& matrix() const { return matrix_; }

  Vector apply(const Eigen::Ref<const Vector>& xi) const { return matrix_.apply(xi); }

  /// (1 - alpha) xi_0 - (D_ax / v) xi'(0), with xi'(0) by the one-sided
  /// second-order difference (-3 xi_0 + 4 xi_1 - xi_2) / 2h.
  double inlet_defect(const Eigen::Ref<const Vector>& xi) const;

  /// (3 xi_{N-1} - 4 xi_{N-2} + xi_{N-3}) / 2h.
  double outlet_defect(const Eigen::Ref<const Vector>& xi) const;

  /// Keeps the interior nodes of `values` and overwrites both end nodes so
  /// that inlet_defect and outlet_defect vanish.
  Profile project_to_domain(Vector values) const;

  /// True when both defects are below tol relative to the size of their terms.
  bool in_domain(const Eigen::Ref<const Vector>& xi, double tol = 1e-8) const;

 private:
  SpatialGrid grid_;
  ReactorParams params_;
  double alpha_;
  Tridiagonal<double> matrix_;
};

DiscreteGenerator build_generator(const SpatialGrid& grid, const ReactorParams& params,
                                  double alpha);

/// Inlet forcing vector of the inhomogeneous Robin condition
/// C(0) = u + (D_ax / v) C'(0) under the same ghost-node closure; nonzero in
/// the first entry only.
Vector inlet_forcing(const SpatialGrid& grid, const ReactorParams& params, double inlet_value);

struct DissipativityReport {
  double form = 0.0;            ///< <A_h xi, xi>_h
  double by_parts = 0.0;        ///< integrated-by-parts value: sum of the three terms below
  double inlet_term = 0.0;      ///< -v (1/2 - alpha) xi(0)^2
  double gradient_term = 0.0;   ///< -D_ax * sum h ((xi_{i+1} - xi_i) / h)^2
  double outlet_term = 0.0;     ///< -(v / 2) xi(l)^2
};

/// Quadratic form <A_h xi, xi>_h next to the integrated-by-parts expression it
/// approximates. Throws ContractError if xi is not in the discrete domain at
/// tolerance domain_tol (see DiscreteGenerator::in_domain). Samples of smooth
/// functions meet the boundary conditions only up to the O(h^2) error of the
/// one-sided slopes and need a looser tolerance.
DissipativityReport dissipativity_form(const DiscreteGenerator& gen, const Profile& xi,
                                       double domain_tol = 1e-8);

/// Interior nodes i.i.d. uniform on [-1, 1], end nodes from the boundary closure.
Profile random_domain_vector(const DiscreteGenerator& gen, std::uint64_t seed);

/// Closed-form solution of D_ax xi'' - v xi' - lambda xi = eta with the
/// alpha-Robin inlet and zero-flux outlet, by variation of constants.
struct ResolventSolution {
  double nu1 = 0.0;           ///< negative characteristic root
  double nu2 = 0.0;           ///< positive characteristic root
  double c3 = 0.0;            ///< coefficient of exp(nu1 x)
  double c4 = 0.0;            ///< coefficient of exp(nu2 x)
  double lambda_shift = 0.0;
  double determinant = 0.0;   ///< boundary-system determinant scaled by exp(-nu2 l)
  Profile xi;
  Vector xi_prime;            ///< exact derivative of the returned solution at the nodes
};

/// Roots of D_ax nu^2 - v nu - lambda = 0, ordered nu1 < nu2.
std::pair<double, double> characteristic_roots(const ReactorParams& params, double lambda_shift);

/// Determinant of the 2x2 system fixing C3, C4, multiplied by exp(-nu2 l).
double resolvent_determinant(const ReactorParams& params, double alpha, double lambda_shift);

/// eta is interpolated piecewise linearly between nodes and the convolution
/// integrals are evaluated exactly for that interpolant. The particular
/// integral is split into a forward part (decaying kernel exp(nu1 (x - s))) and
/// a backward part (kernel exp(nu2 (x - s)) over s > x) so no term grows like
/// exp(nu2 l); C3 and C4 are reported in the un-split form.
ResolventSolution resolvent_analytic(const Profile& eta, double lambda_shift,
                                     const ReactorParams& params, double alpha);

/// Direct tridiagonal solve of (A_h - lambda I) xi = eta.
Profile resolvent_discrete(const DiscreteGenerator& gen, const Profile& eta, double lambda_shift);

}  // namespace dftr
