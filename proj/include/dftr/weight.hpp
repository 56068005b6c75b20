#pragma once

#include "dftr/model.hpp"

namespace dftr {

/// Exponential weight rho(x) = rho0 * exp(-gamma x), the solution of
/// rho' = -gamma rho with rho(0) = rho0.
struct WeightFunction {
  double rho0 = 1.0;
  double gamma = 0.0;
  Vector shape;      ///< exp(-gamma x_i); independent of rho0
  Profile profile;   ///< rho0 * shape
};

/// Throws ParameterError for rho0 <= 0 or gamma < 0.
WeightFunction weight_profile(const SpatialGrid& grid, double rho0, double gamma);

/// gamma = v / (2 D_ax), the weight used in the Lyapunov decay estimate.
double default_weight_rate(const ReactorParams& params);

/// 1/2 * int rho w^2 dx by the trapezoidal rule.
double energy(const Profile& w, const WeightFunction& weight);

/// ||w||_rho = sqrt(int rho w^2 dx) = sqrt(2 * energy).
double weighted_norm(const Profile& w, const WeightFunction& weight);

}  // namespace dftr
