#include "dftr/analysis.hpp"

#include "dftr/errors.hpp"
#include "dftr/text.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace dftr {

DecayEstimate fit_decay_rate(std::span<const double> times, std::span<const double> norms,
                             double lambda_t, const EstimatorOptions& options) {
  if (times.size() != norms.size() || times.empty()) {
    throw ContractError("fit_decay_rate: times and norms must be non-empty and equally long");
  }
  if (!(options.window_fraction > 0.0 && options.window_fraction <= 1.0)) {
    throw ParameterError("window_fraction must lie in (0, 1]");
  }
  if (!(options.floor >= 0.0)) throw ParameterError("floor must be non-negative");

  DecayEstimate out;
  out.lambda_t = lambda_t;
  const double reference = norms[0];
  if (!(reference > 0.0)) {
    out.floor_hit = true;
    return out;
  }
  const double floor = options.floor * reference;

  std::vector<std::size_t> usable;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (norms[j] > floor) {
      usable.push_back(j);
    } else {
      out.floor_hit = true;
    }
  }
  if (usable.size() < 10) {
    throw EstimationError("decay fit needs at least 10 records above the floor, have " +
                              std::to_string(usable.size()),
                          usable.size());
  }
  const auto window = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(options.window_fraction * usable.size())));
  const std::span<const std::size_t> fit(usable.data() + (usable.size() - window), window);

  double t_mean = 0.0;
  double y_mean = 0.0;
  std::vector<double> y(window);
  for (std::size_t i = 0; i < window; ++i) {
    y[i] = std::log(norms[fit[i]] / reference);
    t_mean += times[fit[i]];
    y_mean += y[i];
  }
  t_mean /= static_cast<double>(window);
  y_mean /= static_cast<double>(window);

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    const double dt = times[fit[i]] - t_mean;
    const double dy = y[i] - y_mean;
    sxx += dt * dt;
    sxy += dt * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw EstimationError("decay fit window spans no time", window);
  const double slope = sxy / sxx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    const double fitted = y_mean + slope * (times[fit[i]] - t_mean);
    ss_res += (y[i] - fitted) * (y[i] - fitted);
  }

  out.lambda_n = -slope;
  out.t_start = times[fit.front()];
  out.t_end = times[fit.back()];
  out.fit_r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  out.records_used = window;
  return out;
}

namespace {

// rho0 cancels in the norm ratio; using the bare shape keeps the estimate
// bit-identical under rescaling of rho0.
std::vector<double> shape_norms(const Trajectory& traj, const WeightFunction& weight) {
  require_same_grid(traj.grid, weight.profile.grid, "estimate_decay_rate");
  const Vector w_shape = traj.grid.trapezoid_weights().cwiseProduct(weight.shape);
  std::vector<double> norms;
  norms.reserve(traj.profiles.size());
  for (const auto& w : traj.profiles) norms.push_back(std::sqrt(w_shape.dot(w.cwiseAbs2())));
  return norms;
}

}  // namespace

DecayEstimate estimate_decay_rate(const Trajectory& traj, const WeightFunction& weight,
                                  const ReactorParams& params, const EstimatorOptions& options) {
  const std::vector<double> norms = shape_norms(traj, weight);
  return fit_decay_rate(traj.times, norms, lambda_theoretical(params), options);
}

LyapunovDiagnostics lyapunov_check(const Trajectory& traj, const WeightFunction& weight,
                                   double lambda_t) {
  LyapunovDiagnostics out;
  std::vector<double> energies;
  energies.reserve(traj.profiles.size());
  for (const auto& w : traj.profiles) energies.push_back(energy(Profile(traj.grid, w), weight));
  const double norm0 = std::sqrt(2.0 * energies.front());
  for (std::size_t j = 0; j < energies.size(); ++j) {
    if (j + 1 < energies.size() && energies[j] > 0.0) {
      out.max_energy_ratio = std::max(out.max_energy_ratio, energies[j + 1] / energies[j]);
    }
    if (norm0 > 0.0) {
      const double bound = std::exp(-lambda_t * traj.times[j]) * norm0;
      out.max_envelope_ratio = std::max(out.max_envelope_ratio, std::sqrt(2.0 * energies[j]) / bound);
    }
  }
  return out;
}

SimulationConfig cell_config(const SimulationConfig& base, double n, double alpha,
                             const SweepSettings& settings) {
  SimulationConfig config = base;
  config.params.n = n;
  config.params.t_final = settings.horizon;
  config.law.alpha = alpha;
  config.params.sat_m = settings.sat_m.value_or(default_saturation_bound(config.params, alpha));
  return config;
}

namespace {

std::string describe(const SimulationConfig& c, const SweepSettings& s) {
  const auto& p = c.params;
  std::string text;
  auto add = [&](const char* key, double value) {
    text += key;
    text += '=';
    text += format_g17(value);
    text += ';';
  };
  add("d_ax", p.d_ax);
  add("v", p.v);
  add("k", p.k);
  add("n", p.n);
  add("l", p.l);
  add("horizon", p.t_final);
  add("sat_m", p.sat_m);
  add("alpha", c.law.alpha);
  add("u_bar", c.law.u_bar);
  add("num_nodes", static_cast<double>(c.grid.size()));
  add("dt", c.dt);
  add("record_every", c.record_every);
  add("rho0", c.rho0);
  add("gamma", c.gamma.value_or(default_weight_rate(p)));
  add("window_fraction", s.estimator.window_fraction);
  add("floor", s.estimator.floor);
  return text;
}

}  // namespace

SweepCell run_cell(const SimulationConfig& base, double n, double alpha,
                   const SweepSettings& settings) {
  SweepCell cell;
  cell.n = n;
  cell.alpha = alpha;
  try {
    const SimulationConfig config = cell_config(base, n, alpha, settings);
    const std::string text = describe(config, settings);
    cell.provenance = "hash=" + hex64(fnv1a64(text));

    const SteadyStateSolution steady = steady_state_numeric(config.params, config.law.u_bar, config.grid);
    cell.provenance += " newton_iterations=" + std::to_string(steady.iterations) +
                       " scheme=imex-cn " + text;
    const Profile w0 = initial_profile(config.grid, config.params, config.law);
    const Trajectory traj = simulate(config, steady, w0);
    const WeightFunction weight = config_weight(config);
    cell.estimate = estimate_decay_rate(traj, weight, config.params, settings.estimator);
    cell.lyapunov = lyapunov_check(traj, weight, lambda_theoretical(config.params));
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

SweepResult sweep(const SimulationConfig& base, const std::vector<double>& n_values,
                  const std::vector<double>& alpha_values, const SweepSettings& settings) {
  SweepResult result{n_values, alpha_values, {}};
  const std::size_t total = n_values.size() * alpha_values.size();
  result.cells.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      result.cells[i] = run_cell(base, n_values[i / alpha_values.size()],
                                 alpha_values[i % alpha_values.size()], settings);
    }
  };
  const unsigned threads =
      std::clamp<unsigned>(settings.threads, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

}  // namespace dftr
