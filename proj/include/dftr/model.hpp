#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace dftr {

using Vector = Eigen::VectorXd;

/// Physical constants of the dispersed-flow tubular reactor.
///
/// Units follow the usual SI convention (m, s, mol/m^3); they are documented,
/// not enforced. `sat_m` bounds the deviation seen by the reaction term.
struct ReactorParams {
  double d_ax = 0.0025;  ///< axial dispersion coefficient [m^2/s]
  double v = 0.01;       ///< flow velocity [m/s]
  double k = 0.001;      ///< rate constant
  double n = 1.0;        ///< reaction order
  double l = 1.0;        ///< reactor length [m]
  double t_final = 400.0;
  double sat_m = 10.0;

  double peclet() const { return v * l / d_ax; }
};

/// Throws ParameterError unless every field is finite and strictly positive
/// (k and t_final may be zero).
void validate(const ReactorParams& params);

/// Boundary feedback u_w(t) = alpha * w(0, t) around the steady inlet u_bar.
struct FeedbackLaw {
  double alpha = 0.0;
  double u_bar = 1.0;
};

/// Throws ParameterError unless 0 <= alpha <= 1/2 and u_bar > 0.
void validate(const FeedbackLaw& law);

/// Uniform grid x_i = i * h on [0, l].
class SpatialGrid {
 public:
  SpatialGrid(double length, Eigen::Index num_nodes);

  double length() const { return length_; }
  Eigen::Index size() const { return num_nodes_; }
  double spacing() const { return length_ / static_cast<double>(num_nodes_ - 1); }
  double node(Eigen::Index i) const;
  Vector nodes() const;

  /// Trapezoidal quadrature weights (h/2, h, ..., h, h/2).
  Vector trapezoid_weights() const;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  double length_;
  Eigen::Index num_nodes_;
};

/// Node values of a scalar field on a grid.
struct Profile {
  Profile(SpatialGrid g, Vector v);
  static Profile zeros(const SpatialGrid& g);

  SpatialGrid grid;
  Vector values;
};

/// Throws ContractError unless both grids are identical.
void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);

/// Trapezoidal approximation of the integral of f over [0, l].
double trapezoid(const SpatialGrid& grid, const Eigen::Ref<const Vector>& f);

/// Discrete L2 inner product <a, b>_h with trapezoidal weights.
double inner_product(const SpatialGrid& grid, const Eigen::Ref<const Vector>& a,
                     const Eigen::Ref<const Vector>& b);

/// D_ax recovered from the Peclet number Pe = v * l / D_ax.
double d_ax_from_peclet(double v, double l, double pe);

/// Clamp w to [-m, m].
inline double saturate(double w, double m) {
  if (w > m) return m;
  if (w < -m) return -m;
  return w;
}

/// Reaction rate k * C^n, with negative concentrations contributing no rate.
double reaction_rate(double concentration, double k, double n);

/// Deviation nonlinearity r(w) = k * Cbar^n - k * (Sat_M(w) + Cbar)^n.
///
/// Evaluated as -k Cbar^n expm1(n log1p(s / Cbar)) when both concentrations are
/// positive, which keeps full relative accuracy for |w| << Cbar.
double deviation_reaction(double w, double c_bar, const ReactorParams& params);

/// Nodewise deviation_reaction over a whole profile.
Vector deviation_reaction(const Eigen::Ref<const Vector>& w,
                          const Eigen::Ref<const Vector>& c_bar,
                          const ReactorParams& params);

/// Closed-form initial deviation
///   w(x, 0) = -(x - l)^2 / 2 + l (l v (1 - alpha) + 2 D_ax) / (2 v (1 - alpha)),
/// which satisfies the alpha-Robin inlet and the zero-flux outlet conditions.
double initial_value(double x, const ReactorParams& params, double alpha);

/// initial_value sampled on the grid. Throws ParameterError for alpha >= 1.
Profile initial_profile(const SpatialGrid& grid, const ReactorParams& params,
                        const FeedbackLaw& law);

/// 10 * max |w(x, 0)|, the default saturation bound.
double default_saturation_bound(const ReactorParams& params, double alpha);

/// Theoretical lower bound v^2 / (16 D_ax) on the weighted-norm decay rate.
double lambda_theoretical(const ReactorParams& params);

}  // namespace dftr
