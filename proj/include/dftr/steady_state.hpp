#pragma once

#include "dftr/model.hpp"

namespace dftr {

/// Closed-form steady state for first-order kinetics,
///   Cbar(x) = c5 exp((v + q) x / 2 D_ax) + c6 exp((v - q) x / 2 D_ax),
///   q = sqrt(v^2 + 4 D_ax k).
struct AnalyticSteadyState {
  double c5 = 0.0;
  double c6 = 0.0;
  double q = 0.0;
  ReactorParams params;
  double u_bar = 0.0;

  double operator()(double x) const;
  double derivative(double x) const;
  Profile sample(const SpatialGrid& grid) const;

 private:
  friend AnalyticSteadyState steady_state_analytic_n1(const ReactorParams&, double);
  // c5 * exp(q l / D_ax); finite even when c5 underflows.
  double c5_scaled_ = 0.0;
};

/// params.n is ignored; the caller is responsible for n = 1.
AnalyticSteadyState steady_state_analytic_n1(const ReactorParams& params, double u_bar);

struct SteadyStateSolution {
  Profile profile;
  double residual_norm = 0.0;  ///< scaled max-norm of the discrete residual
  int iterations = 0;
  bool nonnegative = true;     ///< every node >= 0
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  int max_halvings = 30;
};

/// Damped Newton solve of the discrete steady problem
///   A_h C - k C^n + b(u_bar) = 0
/// with A_h the alpha = 0 generator from operator.hpp and b its Robin forcing.
/// Throws SolverError carrying the last residual when Newton stalls.
SteadyStateSolution steady_state_numeric(const ReactorParams& params, double u_bar,
                                         const SpatialGrid& grid, const NewtonOptions& options = {});

/// max_i |D_ax D2 C - v D1 C - k C^n| over interior nodes, plus the inlet
/// defect |C_0 - u_bar - (D_ax / v) C'(0)| and the outlet defect |C'(l)| with
/// one-sided second-order slopes.
double steady_state_residual(const Profile& profile, const ReactorParams& params, double u_bar);

}  // namespace dftr
