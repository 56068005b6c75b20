#include "dftr/weight.hpp"

#include "dftr/errors.hpp"

#include <cmath>
#include <string>

namespace dftr {

WeightFunction weight_profile(const SpatialGrid& grid, double rho0, double gamma) {
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
    throw ParameterError("rho0 must be positive, got " + std::to_string(rho0));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("gamma must be non-negative, got " + std::to_string(gamma));
  }
  Vector shape(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) shape[i] = std::exp(-gamma * grid.node(i));
  Vector rho = rho0 * shape;
  return WeightFunction{rho0, gamma, std::move(shape), Profile(grid, std::move(rho))};
}

double default_weight_rate(const ReactorParams& params) { return params.v / (2.0 * params.d_ax); }

double energy(const Profile& w, const WeightFunction& weight) {
  require_same_grid(w.grid, weight.profile.grid, "energy");
  return 0.5 * inner_product(w.grid, weight.profile.values, w.values.cwiseAbs2());
}

double weighted_norm(const Profile& w, const WeightFunction& weight) {
  return std::sqrt(2.0 * energy(w, weight));
}

}  // namespace dftr
