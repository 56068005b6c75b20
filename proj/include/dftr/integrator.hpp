#pragma once

#include "dftr/model.hpp"
#include "dftr/operator.hpp"
#include "dftr/steady_state.hpp"
#include "dftr/weight.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dftr {

struct SimulationConfig {
  ReactorParams params;
  FeedbackLaw law;
  SpatialGrid grid{1.0, 201};
  double dt = 0.1;
  int record_every = 10;
  bool clamp_monitor = true;       ///< count nodes where w + Cbar < 0
  double rho0 = 1.0;
  std::optional<double> gamma;     ///< weight rate; v / (2 D_ax) when unset
};

/// Throws ContractError for dt <= 0, record_every < 1, a horizon that is not a
/// whole number of steps, or a grid whose length differs from params.l.
void validate(const SimulationConfig& config);

/// Number of steps covering params.t_final.
std::size_t step_count(const SimulationConfig& config);

WeightFunction config_weight(const SimulationConfig& config);

struct Trajectory {
  SpatialGrid grid{1.0, 3};
  std::vector<double> times;
  std::vector<Vector> profiles;
  std::vector<double> control;     ///< u_w = alpha * w(0, t)
  std::vector<double> energy;
  std::size_t negativity_events = 0;
};

/// IMEX Crank-Nicolson stepper for w_t = A_h w + r(w).
///
/// The generator (with the alpha-Robin closure standing in for the feedback)
/// is treated by the trapezoidal rule; the reaction is explicit, extrapolated
/// to the half step as 3/2 r(w^k) - 1/2 r(w^{k-1}). The first step has no
/// history and uses r(w^0).
class ImexStepper {
 public:
  ImexStepper(const SimulationConfig& config, const SteadyStateSolution& steady);

  Vector advance(const Eigen::Ref<const Vector>& w);

  /// Forget the reaction history, so the next advance is a first step.
  void reset() { previous_reaction_.reset(); }

  const DiscreteGenerator& generator() const { return generator_; }

 private:
  ReactorParams params_;
  double dt_;
  DiscreteGenerator generator_;
  Tridiagonal<double> explicit_part_;
  ThomasSolver<double> implicit_part_;
  Vector c_bar_;
  std::optional<Vector> previous_reaction_;
};

/// Largest dt * |dr/dw| over C = Cbar and C = Cbar + Sat_M(w0).
double reaction_stiffness(const SimulationConfig& config, const Vector& c_bar, const Vector& w0);

/// Explicit-reaction stability guard: reaction_stiffness must not exceed this.
inline constexpr double kMaxReactionStiffness = 0.5;

/// One first step from `state`.
Profile step(const Profile& state, const SteadyStateSolution& steady, const SimulationConfig& config);

/// Integrates to params.t_final, recording every `record_every` steps and the
/// final state. Throws IntegrationError (with the step index) on a non-finite
/// state or when dt fails the stiffness guard.
Trajectory simulate(const SimulationConfig& config, const SteadyStateSolution& steady,
                    const Profile& w0);

}  // namespace dftr
