#include "dftr/analysis.hpp"
#include "dftr/errors.hpp"
#include "dftr/weight.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace dftr;
using dftr::testing::nominal_params;

namespace {

SimulationConfig nominal_base() {
  SimulationConfig c;
  c.params = nominal_params();
  return c;
}

std::vector<double> record_times(std::size_t count, double spacing) {
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) t[j] = spacing * static_cast<double>(j);
  return t;
}

// Continuous decay rate of the n = 1, alpha = 0 linearization: with
// xi = exp(v x / 2D) phi the Robin/Neumann pair becomes symmetric and the
// principal mode is cos(kappa (x - l/2)) with kappa tan(kappa l / 2) = v / 2D.
double principal_rate(const ReactorParams& p) {
  const double a = p.v / (2.0 * p.d_ax);
  double lo = 1e-9;
  double hi = M_PI / p.l - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tan(mid * p.l / 2.0) < a ? lo : hi) = mid;
  }
  const double kappa = 0.5 * (lo + hi);
  return p.v * p.v / (4.0 * p.d_ax) + p.d_ax * kappa * kappa + p.k;
}

}  // namespace

TEST_CASE("weight profile examples") {
  const SpatialGrid grid(1.0, 201);
  const WeightFunction w = weight_profile(grid, 3.0, 2.0);
  CHECK(w.profile.values[0] == 3.0);
  CHECK(w.profile.values[200] / w.profile.values[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(default_weight_rate(nominal_params()) == doctest::Approx(2.0).epsilon(1e-15));
  const WeightFunction flat = weight_profile(grid, 1.0, 0.0);
  CHECK(flat.profile.values.minCoeff() == 1.0);
  const Profile x(grid, grid.nodes());
  CHECK(energy(x, flat) == doctest::Approx(0.5 * inner_product(grid, x.values, x.values)).epsilon(1e-15));
  CHECK_THROWS_AS(weight_profile(grid, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(weight_profile(grid, 1.0, -1.0), ParameterError);
}

TEST_CASE("energy examples") {
  const SpatialGrid grid(1.0, 101);
  const WeightFunction flat = weight_profile(grid, 1.0, 0.0);
  CHECK(energy(Profile::zeros(grid), flat) == 0.0);
  CHECK(energy(Profile(grid, Vector::Ones(101)), flat) == doctest::Approx(0.5).epsilon(1e-15));
  const WeightFunction rho = weight_profile(grid, 1.0, 2.0);
  const Profile w(grid, grid.nodes().array().sin());
  for (double c : {-3.0, 0.5, 7.0}) {
    const Profile scaled(grid, c * w.values);
    CHECK(energy(scaled, rho) == doctest::Approx(c * c * energy(w, rho)).epsilon(1e-15));
  }
  CHECK(weighted_norm(w, rho) == doctest::Approx(std::sqrt(2.0 * energy(w, rho))));
  CHECK_THROWS_AS(energy(Profile::zeros(SpatialGrid(1.0, 11)), rho), ContractError);
}

TEST_CASE("estimator is exact on pure exponentials") {
  const std::vector<double> t = record_times(7001, 1.0);
  for (double rate : {1e-4, 2.5e-3, 1e-1}) {
    std::vector<double> norms;
    for (double s : t) norms.push_back(std::exp(-rate * s));
    const DecayEstimate e = fit_decay_rate(t, norms, 0.0025);
    REQUIRE(e.lambda_n);
    CHECK(std::abs(*e.lambda_n - rate) <= (rate == 2.5e-3 ? 1e-12 : 1e-10));
    CHECK(e.fit_r2 == doctest::Approx(1.0));
    CHECK(e.lambda_t == 0.0025);
    CHECK(e.t_end > e.t_start);
  }
}

TEST_CASE("floor hygiene") {
  const std::vector<double> t = record_times(200, 1.0);
  std::vector<double> norms;
  for (double s : t) norms.push_back(s < 100.0 ? std::exp(-0.01 * s) : 0.0);
  const DecayEstimate e = fit_decay_rate(t, norms, 0.0025);
  CHECK(e.floor_hit);
  REQUIRE(e.lambda_n);
  CHECK(*e.lambda_n == doctest::Approx(0.01).epsilon(1e-10));
  CHECK(e.t_end < 100.0);
}

TEST_CASE("all-zero trajectory reports a floor hit without a rate") {
  const std::vector<double> t = record_times(50, 1.0);
  const std::vector<double> zeros(50, 0.0);
  const DecayEstimate e = fit_decay_rate(t, zeros, 0.0025);
  CHECK(e.floor_hit);
  CHECK_FALSE(e.lambda_n.has_value());
}

TEST_CASE("too few usable records is an estimation error") {
  const std::vector<double> t = record_times(20, 1.0);
  std::vector<double> norms(20, 0.0);
  for (std::size_t j = 0; j < 5; ++j) norms[j] = std::exp(-static_cast<double>(j));
  try {
    fit_decay_rate(t, norms, 0.0025);
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    CHECK(e.usable_records() == 5);
  }
  CHECK_THROWS_AS(fit_decay_rate(t, norms, 0.0025, {0.0, 1e-12}), ParameterError);
}

TEST_CASE("fitted rate matches the principal eigenvalue for first-order kinetics") {
  SimulationConfig c = nominal_base();
  c.params.t_final = 7000.0;
  c.params.sat_m = default_saturation_bound(c.params, 0.0);
  const auto steady = steady_state_numeric(c.params, 1.0, c.grid);
  const Trajectory traj = simulate(c, steady, initial_profile(c.grid, c.params, c.law));
  const DecayEstimate e = estimate_decay_rate(traj, config_weight(c), c.params);
  REQUIRE(e.lambda_n);

  const Eigen::MatrixXd a = build_generator(c.grid, c.params, 0.0).matrix().dense();
  const double mu = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().real().maxCoeff();
  CHECK(*e.lambda_n == doctest::Approx(-mu + c.params.k).epsilon(1e-6));
  CHECK(*e.lambda_n == doctest::Approx(principal_rate(c.params)).epsilon(1e-4));
  CHECK(*e.lambda_n >= lambda_theoretical(c.params));
}

TEST_CASE("rate estimate is independent of rho0") {
  SimulationConfig c = nominal_base();
  c.params.t_final = 2000.0;
  c.params.n = 2.0;
  c.params.sat_m = default_saturation_bound(c.params, 0.0);
  const auto steady = steady_state_numeric(c.params, 1.0, c.grid);
  const Trajectory traj = simulate(c, steady, initial_profile(c.grid, c.params, c.law));
  const double gamma = default_weight_rate(c.params);
  const auto base = estimate_decay_rate(traj, weight_profile(c.grid, 1.0, gamma), c.params);
  for (double rho0 : {1e-3, 3.0, 1e5}) {
    const auto scaled = estimate_decay_rate(traj, weight_profile(c.grid, rho0, gamma), c.params);
    CHECK(*scaled.lambda_n == *base.lambda_n);
  }
}

TEST_CASE("energy monotonicity across admissible weights at the corner cells") {
  const ReactorParams p = nominal_params();
  const double g = p.v / p.d_ax;
  for (auto [n, alpha] : {std::pair{0.5, 0.0}, std::pair{10.0, 0.5}}) {
    for (double gamma : {g / 4.0, g / 2.0, 3.0 * g / 4.0}) {
      SimulationConfig c = nominal_base();
      c.gamma = gamma;
      SweepSettings settings;
      const SimulationConfig cell = cell_config(c, n, alpha, settings);
      const auto steady = steady_state_numeric(cell.params, 1.0, cell.grid);
      const Trajectory traj = simulate(cell, steady, initial_profile(cell.grid, cell.params, cell.law));
      const auto d = lyapunov_check(traj, config_weight(cell), lambda_theoretical(cell.params));
      CHECK(d.max_energy_ratio <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("single-cell sweep equals simulate plus estimate") {
  SweepSettings settings;
  settings.horizon = 3000.0;
  const SimulationConfig base = nominal_base();
  const SweepResult result = sweep(base, {2.0}, {0.25}, settings);
  REQUIRE(result.cells.size() == 1);
  REQUIRE(result.cells[0].error.empty());

  const SimulationConfig c = cell_config(base, 2.0, 0.25, settings);
  const auto steady = steady_state_numeric(c.params, 1.0, c.grid);
  const Trajectory traj = simulate(c, steady, initial_profile(c.grid, c.params, c.law));
  const auto direct = estimate_decay_rate(traj, config_weight(c), c.params);
  CHECK(*result.cells[0].estimate->lambda_n == *direct.lambda_n);
  CHECK(result.cells[0].estimate->fit_r2 == direct.fit_r2);
  CHECK(result.cells[0].provenance.find("hash=") == 0);
}

TEST_CASE("sweep order and values do not depend on the thread count") {
  SweepSettings settings;
  settings.horizon = 1000.0;
  const std::vector<double> ns{1.0, 0.5, 2.0};
  const std::vector<double> alphas{0.5, 0.0};
  const SweepResult serial = sweep(nominal_base(), ns, alphas, settings);
  settings.threads = 4;
  const SweepResult parallel = sweep(nominal_base(), ns, alphas, settings);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      CHECK(parallel.at(i, j).n == ns[i]);
      CHECK(parallel.at(i, j).alpha == alphas[j]);
      CHECK(*parallel.at(i, j).estimate->lambda_n == *serial.at(i, j).estimate->lambda_n);
    }
  }
}

TEST_CASE("failed cells are recorded without aborting the sweep") {
  SimulationConfig base = nominal_base();
  base.dt = 1.0;
  SweepSettings settings;
  settings.horizon = 500.0;
  const SweepResult result = sweep(base, {1.0, 10.0}, {0.5}, settings);
  CHECK(result.at(0, 0).error.empty());
  CHECK(result.at(0, 0).estimate.has_value());
  CHECK_FALSE(result.at(1, 0).error.empty());
  CHECK_FALSE(result.at(1, 0).estimate.has_value());
}

TEST_CASE("Lyapunov diagnostics on a synthetic trajectory") {
  const SpatialGrid grid(1.0, 11);
  Trajectory traj;
  traj.grid = grid;
  for (int j = 0; j < 5; ++j) {
    traj.times.push_back(j * 100.0);
    traj.profiles.push_back(Vector::Constant(11, std::exp(-0.003 * j * 100.0)));
  }
  const auto d = lyapunov_check(traj, weight_profile(grid, 1.0, 0.0), 0.0025);
  CHECK(d.max_energy_ratio == doctest::Approx(std::exp(-0.6)));
  CHECK(d.max_envelope_ratio == doctest::Approx(1.0));
}
