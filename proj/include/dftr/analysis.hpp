#pragma once

#include "dftr/integrator.hpp"
#include "dftr/weight.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dftr {

struct EstimatorOptions {
  double window_fraction = 0.5;  ///< trailing share of usable records in the fit
  double floor = 1e-12;          ///< norm floor relative to ||w(., 0)||_rho
};

/// Fitted decay rate of the weighted norm next to the theoretical bound.
struct DecayEstimate {
  std::optional<double> lambda_n;  ///< empty when the trajectory is identically zero
  double lambda_t = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double fit_r2 = 0.0;
  bool floor_hit = false;
  std::size_t records_used = 0;
};

/// Least-squares decay rate of norms[j] / norms[0] against times.
///
/// Records whose norm is at or below floor * norms[0] are dropped; the fit uses
/// the trailing window_fraction of the rest. lambda_n is minus the slope of
/// log(norm ratio) in t. Throws EstimationError for fewer than 10 usable
/// records.
DecayEstimate fit_decay_rate(std::span<const double> times, std::span<const double> norms,
                             double lambda_t, const EstimatorOptions& options = {});

DecayEstimate estimate_decay_rate(const Trajectory& traj, const WeightFunction& weight,
                                  const ReactorParams& params,
                                  const EstimatorOptions& options = {});

/// Discrete counterparts of the Lyapunov inequalities along a trajectory.
struct LyapunovDiagnostics {
  double max_energy_ratio = 0.0;    ///< max_j E(t_{j+1}) / E(t_j)
  double max_envelope_ratio = 0.0;  ///< max_j ||w_j||_rho / (exp(-lambda_t t_j) ||w_0||_rho)
};

LyapunovDiagnostics lyapunov_check(const Trajectory& traj, const WeightFunction& weight,
                                   double lambda_t);

struct SweepSettings {
  double horizon = 7000.0;
  EstimatorOptions estimator;
  std::optional<double> sat_m;  ///< default_saturation_bound per cell when unset
  unsigned threads = 1;
};

struct SweepCell {
  double n = 0.0;
  double alpha = 0.0;
  std::optional<DecayEstimate> estimate;
  std::optional<LyapunovDiagnostics> lyapunov;
  std::string error;       ///< empty on success
  std::string provenance;  ///< cell config hash and solver settings
};

struct SweepResult {
  std::vector<double> n_values;
  std::vector<double> alpha_values;
  std::vector<SweepCell> cells;  ///< row-major in (n, alpha)

  const SweepCell& at(std::size_t n_index, std::size_t alpha_index) const {
    return cells[n_index * alpha_values.size() + alpha_index];
  }
};

/// Configuration of a single sweep cell: base config with n, alpha, horizon
/// and saturation bound substituted.
SimulationConfig cell_config(const SimulationConfig& base, double n, double alpha,
                             const SweepSettings& settings);

/// Steady state, initial profile, simulation and rate estimate for one cell.
/// Failures are caught and reported in SweepCell::error.
SweepCell run_cell(const SimulationConfig& base, double n, double alpha,
                   const SweepSettings& settings);

/// All (n, alpha) cells, possibly on several threads. The result order follows
/// the input lists regardless of completion order.
SweepResult sweep(const SimulationConfig& base, const std::vector<double>& n_values,
                  const std::vector<double>& alpha_values, const SweepSettings& settings = {});

}  // namespace dftr
