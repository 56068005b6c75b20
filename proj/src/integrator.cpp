#include "dftr/integrator.hpp"

#include "dftr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dftr {

void validate(const SimulationConfig& config) {
  validate(config.params);
  validate(config.law);
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw ContractError("dt must be positive, got " + std::to_string(config.dt));
  }
  if (config.record_every < 1) {
    throw ContractError("record_every must be at least 1");
  }
  if (std::abs(config.grid.length() - config.params.l) > 1e-12 * config.params.l) {
    throw ContractError("grid length differs from the reactor length");
  }
  const double steps = config.params.t_final / config.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ContractError("t_final is not a whole number of dt steps");
  }
}

std::size_t step_count(const SimulationConfig& config) {
  return static_cast<std::size_t>(std::llround(config.params.t_final / config.dt));
}

WeightFunction config_weight(const SimulationConfig& config) {
  return weight_profile(config.grid, config.rho0,
                        config.gamma.value_or(default_weight_rate(config.params)));
}

ImexStepper::ImexStepper(const SimulationConfig& config, const SteadyStateSolution& steady)
    : params_(config.params),
      dt_(config.dt),
      generator_(config.grid, config.params, config.law.alpha),
      explicit_part_(generator_.matrix().shifted(1.0, 0.5 * config.dt)),
      implicit_part_(generator_.matrix().shifted(1.0, -0.5 * config.dt)),
      c_bar_(steady.profile.values) {
  require_same_grid(config.grid, steady.profile.grid, "ImexStepper");
}

Vector ImexStepper::advance(const Eigen::Ref<const Vector>& w) {
  Vector reaction = deviation_reaction(w, c_bar_, params_);
  Vector rhs = explicit_part_.apply(w);
  if (previous_reaction_) {
    rhs += dt_ * (1.5 * reaction - 0.5 * *previous_reaction_);
  } else {
    rhs += dt_ * reaction;
  }
  previous_reaction_ = std::move(reaction);
  return implicit_part_.solve(rhs);
}

double reaction_stiffness(const SimulationConfig& config, const Vector& c_bar, const Vector& w0) {
  const auto& p = config.params;
  double slope = 0.0;
  auto visit = [&](double c) {
    if (!(c > 0.0)) return;
    slope = std::max(slope, p.k * p.n * std::pow(c, p.n - 1.0));
  };
  for (Eigen::Index i = 0; i < c_bar.size(); ++i) {
    visit(c_bar[i]);
    visit(c_bar[i] + saturate(w0[i], p.sat_m));
  }
  return config.dt * slope;
}

Profile step(const Profile& state, const SteadyStateSolution& steady,
             const SimulationConfig& config) {
  validate(config);
  require_same_grid(config.grid, state.grid, "step");
  ImexStepper stepper(config, steady);
  Vector next = stepper.advance(state.values);
  if (!next.allFinite()) throw IntegrationError("non-finite state after step", 1);
  return Profile(config.grid, std::move(next));
}

Trajectory simulate(const SimulationConfig& config, const SteadyStateSolution& steady,
                    const Profile& w0) {
  validate(config);
  require_same_grid(config.grid, w0.grid, "simulate");
  require_same_grid(config.grid, steady.profile.grid, "simulate");

  const double stiffness = reaction_stiffness(config, steady.profile.values, w0.values);
  if (stiffness > kMaxReactionStiffness) {
    throw IntegrationError("dt too large for the explicit reaction term: dt*|r'| = " +
                               std::to_string(stiffness),
                           0);
  }

  const WeightFunction weight = config_weight(config);
  const Vector& c_bar = steady.profile.values;
  const std::size_t steps = step_count(config);
  const auto every = static_cast<std::size_t>(config.record_every);

  Trajectory traj;
  traj.grid = config.grid;
  const std::size_t expected = steps / every + 2;
  traj.times.reserve(expected);
  traj.profiles.reserve(expected);
  traj.control.reserve(expected);
  traj.energy.reserve(expected);

  auto record = [&](std::size_t index, const Vector& w) {
    traj.times.push_back(static_cast<double>(index) * config.dt);
    traj.profiles.push_back(w);
    traj.control.push_back(config.law.alpha * w[0]);
    traj.energy.push_back(energy(Profile(config.grid, w), weight));
  };
  auto monitor = [&](const Vector& w) {
    if (!config.clamp_monitor) return;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w[i] + c_bar[i] < -1e-12) ++traj.negativity_events;
    }
  };

  ImexStepper stepper(config, steady);
  Vector w = w0.values;
  monitor(w);
  record(0, w);
  for (std::size_t s = 1; s <= steps; ++s) {
    w = stepper.advance(w);
    if (!w.allFinite()) throw IntegrationError("non-finite state at step " + std::to_string(s), s);
    monitor(w);
    if (s % every == 0 || s == steps) record(s, w);
  }
  return traj;
}

}  // namespace dftr
