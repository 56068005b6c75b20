#include "dftr/model.hpp"

#include "dftr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dftr {

namespace {

void require_positive(double value, const char* name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw ParameterError(std::string(name) + " must be positive and finite, got " +
                         std::to_string(value));
  }
}

}  // namespace

void validate(const ReactorParams& params) {
  require_positive(params.d_ax, "d_ax");
  require_positive(params.v, "v");
  // k = 0 is admitted as the zero-reaction limit.
  if (!(std::isfinite(params.k) && params.k >= 0.0)) {
    throw ParameterError("k must be non-negative and finite, got " + std::to_string(params.k));
  }
  require_positive(params.n, "n");
  require_positive(params.l, "l");
  // A zero horizon yields the initial record only.
  if (!(std::isfinite(params.t_final) && params.t_final >= 0.0)) {
    throw ParameterError("t_final must be non-negative and finite, got " +
                         std::to_string(params.t_final));
  }
  require_positive(params.sat_m, "sat_m");
}

void validate(const FeedbackLaw& law) {
  if (!(law.alpha >= 0.0 && law.alpha <= 0.5)) {
    throw ParameterError("alpha must lie in [0, 1/2], got " + std::to_string(law.alpha));
  }
  require_positive(law.u_bar, "u_bar");
}

SpatialGrid::SpatialGrid(double length, Eigen::Index num_nodes)
    : length_(length), num_nodes_(num_nodes) {
  require_positive(length, "grid length");
  if (num_nodes < 3) {
    throw ParameterError("grid needs at least 3 nodes, got " + std::to_string(num_nodes));
  }
}

double SpatialGrid::node(Eigen::Index i) const {
  // Pin the last node to l exactly.
  if (i == num_nodes_ - 1) return length_;
  return static_cast<double>(i) * spacing();
}

Vector SpatialGrid::nodes() const {
  Vector x(num_nodes_);
  for (Eigen::Index i = 0; i < num_nodes_; ++i) x[i] = node(i);
  return x;
}

Vector SpatialGrid::trapezoid_weights() const {
  Vector w = Vector::Constant(num_nodes_, spacing());
  w[0] *= 0.5;
  w[num_nodes_ - 1] *= 0.5;
  return w;
}

Profile::Profile(SpatialGrid g, Vector v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw ContractError("profile has " + std::to_string(values.size()) +
                        " values for a grid of " + std::to_string(grid.size()) + " nodes");
  }
  if (!values.allFinite()) throw ContractError("profile contains non-finite values");
}

Profile Profile::zeros(const SpatialGrid& g) { return Profile(g, Vector::Zero(g.size())); }

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
  if (!(a == b)) throw ContractError(std::string(where) + ": grid mismatch");
}

double trapezoid(const SpatialGrid& grid, const Eigen::Ref<const Vector>& f) {
  return grid.trapezoid_weights().dot(f);
}

double inner_product(const SpatialGrid& grid, const Eigen::Ref<const Vector>& a,
                     const Eigen::Ref<const Vector>& b) {
  return (grid.trapezoid_weights().array() * a.array() * b.array()).sum();
}

double d_ax_from_peclet(double v, double l, double pe) {
  require_positive(v, "v");
  require_positive(l, "l");
  require_positive(pe, "peclet");
  return v * l / pe;
}

double reaction_rate(double concentration, double k, double n) {
  return k * std::pow(std::max(concentration, 0.0), n);
}

double deviation_reaction(double w, double c_bar, const ReactorParams& params) {
  const double s = saturate(w, params.sat_m);
  const double c = c_bar + s;
  if (c_bar > 0.0 && c > 0.0) {
    return -params.k * std::pow(c_bar, params.n) * std::expm1(params.n * std::log1p(s / c_bar));
  }
  return reaction_rate(c_bar, params.k, params.n) - reaction_rate(c, params.k, params.n);
}

Vector deviation_reaction(const Eigen::Ref<const Vector>& w,
                          const Eigen::Ref<const Vector>& c_bar,
                          const ReactorParams& params) {
  Vector r(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) r[i] = deviation_reaction(w[i], c_bar[i], params);
  return r;
}

double initial_value(double x, const ReactorParams& params, double alpha) {
  const double one_minus = 1.0 - alpha;
  const double l = params.l;
  return -0.5 * (x - l) * (x - l) +
         l * (l * params.v * one_minus + 2.0 * params.d_ax) / (2.0 * params.v * one_minus);
}

Profile initial_profile(const SpatialGrid& grid, const ReactorParams& params,
                        const FeedbackLaw& law) {
  if (!(law.alpha < 1.0)) {
    throw ParameterError("initial profile requires alpha < 1, got " + std::to_string(law.alpha));
  }
  Vector w(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) w[i] = initial_value(grid.node(i), params, law.alpha);
  return Profile(grid, std::move(w));
}

double default_saturation_bound(const ReactorParams& params, double alpha) {
  // The profile is a downward parabola with its vertex at x = l.
  const double at_inlet = initial_value(0.0, params, alpha);
  const double at_outlet = initial_value(params.l, params, alpha);
  return 10.0 * std::max(std::abs(at_inlet), std::abs(at_outlet));
}

double lambda_theoretical(const ReactorParams& params) {
  return params.v * params.v / (16.0 * params.d_ax);
}

}  // namespace dftr
