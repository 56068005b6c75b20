#include "dftr/steady_state.hpp"

#include "dftr/errors.hpp"
#include "dftr/operator.hpp"
#include "dftr/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dftr {

namespace {

constexpr double kPositiveFloor = 1e-12;

double reaction_slope(double c, const ReactorParams& params) {
  if (params.n < 1.0) return params.k * params.n * std::pow(std::max(c, kPositiveFloor), params.n - 1.0);
  return params.k * params.n * std::pow(std::max(c, 0.0), params.n - 1.0);
}

Vector stationary_residual(const DiscreteGenerator& gen, const Vector& forcing, const Vector& c) {
  const auto& p = gen.params();
  Vector f = gen.apply(c) + forcing;
  for (Eigen::Index i = 0; i < c.size(); ++i) f[i] -= reaction_rate(c[i], p.k, p.n);
  return f;
}

}  // namespace

double AnalyticSteadyState::operator()(double x) const {
  const double d = params.d_ax;
  const double v = params.v;
  const double grow = c5_scaled_ * std::exp((v + q) * x / (2.0 * d) - q * params.l / d);
  const double decay = c6 * std::exp((v - q) * x / (2.0 * d));
  return grow + decay;
}

double AnalyticSteadyState::derivative(double x) const {
  const double d = params.d_ax;
  const double v = params.v;
  const double grow = c5_scaled_ * std::exp((v + q) * x / (2.0 * d) - q * params.l / d);
  const double decay = c6 * std::exp((v - q) * x / (2.0 * d));
  return grow * (v + q) / (2.0 * d) + decay * (v - q) / (2.0 * d);
}

Profile AnalyticSteadyState::sample(const SpatialGrid& grid) const {
  Vector c(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) c[i] = (*this)(grid.node(i));
  return Profile(grid, std::move(c));
}

AnalyticSteadyState steady_state_analytic_n1(const ReactorParams& params, double u_bar) {
  validate(params);
  if (!(u_bar >= 0.0) || !std::isfinite(u_bar)) {
    throw ParameterError("u_bar must be non-negative, got " + std::to_string(u_bar));
  }
  const double d = params.d_ax;
  const double v = params.v;
  const double q = std::sqrt(v * v + 4.0 * d * params.k);
  // Numerator and denominator of C5 divided by exp(q l / D_ax).
  const double damp = std::exp(-q * params.l / d);
  const double plus2 = (v + q) * (v + q);
  const double minus2 = (v - q) * (v - q);

  AnalyticSteadyState out;
  out.q = q;
  out.params = params;
  out.u_bar = u_bar;
  out.c5_scaled_ = -u_bar * 2.0 * v * (v - q) / (plus2 - minus2 * damp);
  out.c5 = out.c5_scaled_ * damp;
  out.c6 = u_bar * 2.0 * v * (v + q) / (plus2 - minus2 * damp);
  return out;
}

SteadyStateSolution steady_state_numeric(const ReactorParams& params, double u_bar,
                                         const SpatialGrid& grid, const NewtonOptions& options) {
  validate(params);
  if (!(u_bar > 0.0) || !std::isfinite(u_bar)) {
    throw ParameterError("u_bar must be positive, got " + std::to_string(u_bar));
  }
  const DiscreteGenerator gen(grid, params, 0.0);
  const Vector forcing = inlet_forcing(grid, params, u_bar);
  const double scale = params.d_ax * u_bar / (params.l * params.l) + params.v * u_bar / params.l +
                       reaction_rate(u_bar, params.k, params.n);

  Vector c = std::abs(params.n - 1.0) <= 1e-12
                 ? steady_state_analytic_n1(params, u_bar).sample(grid).values
                 : Vector::Constant(grid.size(), u_bar);
  Vector f = stationary_residual(gen, forcing, c);
  double norm = f.cwiseAbs().maxCoeff() / scale;

  int iterations = 0;
  while (norm > options.tolerance) {
    if (iterations == options.max_iterations) {
      throw SolverError("steady-state Newton did not converge in " +
                            std::to_string(options.max_iterations) + " iterations",
                        norm);
    }
    Tridiagonal<double> jacobian = gen.matrix();
    for (Eigen::Index i = 0; i < c.size(); ++i) jacobian.diag[i] -= reaction_slope(c[i], params);
    const Vector delta = ThomasSolver<double>(jacobian).solve(-f);

    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, step *= 0.5) {
      Vector trial = c + step * delta;
      Vector trial_f = stationary_residual(gen, forcing, trial);
      const double trial_norm = trial_f.cwiseAbs().maxCoeff() / scale;
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        c = std::move(trial);
        f = std::move(trial_f);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) {
      throw SolverError("steady-state Newton stalled: damping found no residual decrease", norm);
    }
  }

  const bool nonnegative = c.minCoeff() >= 0.0;
  return SteadyStateSolution{Profile(grid, std::move(c)), norm, iterations, nonnegative};
}

double steady_state_residual(const Profile& profile, const ReactorParams& params, double u_bar) {
  const Vector& c = profile.values;
  const Eigen::Index n = c.size();
  const double h = profile.grid.spacing();
  const double d = params.d_ax;
  const double v = params.v;

  double interior = 0.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double second = (c[i + 1] - 2.0 * c[i] + c[i - 1]) / (h * h);
    const double first = (c[i + 1] - c[i - 1]) / (2.0 * h);
    const double r = d * second - v * first - reaction_rate(c[i], params.k, params.n);
    interior = std::max(interior, std::abs(r));
  }
  const double inlet_slope = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * h);
  const double outlet_slope = (3.0 * c[n - 1] - 4.0 * c[n - 2] + c[n - 3]) / (2.0 * h);
  const double inlet = std::abs(c[0] - u_bar - d / v * inlet_slope);
  return interior + inlet + std::abs(outlet_slope);
}

}  // namespace dftr
