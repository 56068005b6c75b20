#include "dftr/errors.hpp"
#include "dftr/integrator.hpp"
#include "dftr/steady_state.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dftr;
using dftr::testing::nominal_params;

namespace {

double relative_max_error(const ReactorParams& p, Eigen::Index nodes) {
  const SpatialGrid grid(p.l, nodes);
  const Vector numeric = steady_state_numeric(p, 1.0, grid).profile.values;
  const Vector analytic = steady_state_analytic_n1(p, 1.0).sample(grid).values;
  return (numeric - analytic).cwiseAbs().maxCoeff() / analytic.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("analytic steady state coefficients") {
  const auto s = steady_state_analytic_n1(nominal_params(), 1.0);
  CHECK(s.q == doctest::Approx(0.0104881).epsilon(1e-6));
  CHECK(s.q == doctest::Approx(std::sqrt(1e-4 + 4 * 0.0025 * 0.001)).epsilon(1e-15));
}

TEST_CASE("analytic steady state satisfies both boundary conditions") {
  const ReactorParams p = nominal_params();
  const auto s = steady_state_analytic_n1(p, 1.0);
  CHECK(std::abs(s(0.0) - 1.0 - (p.d_ax / p.v) * s.derivative(0.0)) <= 1e-14);
  CHECK(std::abs(s.derivative(p.l)) <= 1e-14);
}

TEST_CASE("zero-reaction limit is the constant inlet value") {
  ReactorParams p = nominal_params();
  p.k = 1e-14;
  const auto s = steady_state_analytic_n1(p, 1.0);
  CHECK(s.q == doctest::Approx(p.v).epsilon(1e-10));
  const SpatialGrid grid(1.0, 101);
  const Profile profile = s.sample(grid);
  CHECK((profile.values.array() - 1.0).abs().maxCoeff() <= 1e-9);
  p.k = 0.0;
  CHECK(steady_state_residual(Profile(grid, Vector::Ones(101)), p, 1.0) == 0.0);
}

TEST_CASE("zero inlet value gives the zero steady state") {
  const auto s = steady_state_analytic_n1(nominal_params(), 0.0);
  CHECK(s.c5 == 0.0);
  CHECK(s.c6 == 0.0);
  CHECK(s.sample(SpatialGrid(1.0, 11)).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic profile is non-negative on a fine grid") {
  const Profile profile = steady_state_analytic_n1(nominal_params(), 1.0).sample(SpatialGrid(1.0, 2001));
  CHECK(profile.values.minCoeff() >= 0.0);
}

TEST_CASE("analytic profile is linear in the inlet value") {
  const SpatialGrid grid(1.0, 201);
  const Vector one = steady_state_analytic_n1(nominal_params(), 1.0).sample(grid).values;
  const Vector two = steady_state_analytic_n1(nominal_params(), 2.0).sample(grid).values;
  CHECK((two - 2.0 * one).cwiseAbs().maxCoeff() <= 4 * std::numeric_limits<double>::epsilon());
}

TEST_CASE("analytic coefficients stay finite at large Peclet numbers") {
  ReactorParams p = nominal_params();
  p.v = 1.0;
  p.d_ax = 1e-4;
  const auto s = steady_state_analytic_n1(p, 1.0);
  CHECK(std::isfinite(s(0.0)));
  CHECK(std::isfinite(s(1.0)));
  CHECK(s(1.0) > 0.0);
}

TEST_CASE("numeric steady state matches the analytic one at second order") {
  const ReactorParams p = nominal_params();
  const double e101 = relative_max_error(p, 101);
  const double e201 = relative_max_error(p, 201);
  const double e401 = relative_max_error(p, 401);
  CHECK(e201 <= 1e-6);
  CHECK(testing::observed_order(e101, e201) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(testing::observed_order(e201, e401) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("numeric steady state reports its Newton statistics") {
  const NewtonOptions options;
  for (double n : {0.5, 1.0, 2.0, 10.0}) {
    const auto s = steady_state_numeric(nominal_params(n), 1.0, SpatialGrid(1.0, 201), options);
    CHECK(s.residual_norm <= options.tolerance);
    CHECK(s.iterations <= options.max_iterations);
    CHECK(s.nonnegative);
  }
}

TEST_CASE("without reaction the numeric steady state is the inlet value") {
  for (double n : {0.5, 1.0, 2.0, 10.0}) {
    ReactorParams p = nominal_params(n);
    p.k = 0.0;
    const auto s = steady_state_numeric(p, 1.7, SpatialGrid(1.0, 101));
    CHECK((s.profile.values.array() - 1.7).abs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("numeric steady state is an exact discrete equilibrium") {
  const ReactorParams p = nominal_params(2.0);
  SimulationConfig config;
  config.params = p;
  config.params.sat_m = default_saturation_bound(p, 0.0);
  const auto steady = steady_state_numeric(p, 1.0, config.grid);
  const Trajectory traj = simulate(config, steady, Profile::zeros(config.grid));
  for (const auto& w : traj.profiles) CHECK(w.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("steady residual examples") {
  const ReactorParams p = nominal_params();
  const SpatialGrid fine(1.0, 2001);
  CHECK(steady_state_residual(steady_state_analytic_n1(p, 1.0).sample(fine), p, 1.0) <= 1e-6);
  CHECK(steady_state_residual(Profile::zeros(fine), p, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("analytic residual decreases at second order") {
  const ReactorParams p = nominal_params();
  const auto s = steady_state_analytic_n1(p, 1.0);
  const double r1 = steady_state_residual(s.sample(SpatialGrid(1.0, 501)), p, 1.0);
  const double r2 = steady_state_residual(s.sample(SpatialGrid(1.0, 1001)), p, 1.0);
  CHECK(testing::observed_order(r1, r2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("Newton failure surfaces as a solver error") {
  // Sub-linear kinetics with a fast rate: the concentration dies out inside
  // the reactor and Newton cannot settle on the non-smooth profile.
  ReactorParams p = nominal_params(0.5);
  p.k = 10.0;
  CHECK_THROWS_AS(steady_state_numeric(p, 1.0, SpatialGrid(1.0, 201)), SolverError);
  try {
    steady_state_numeric(p, 1.0, SpatialGrid(1.0, 201));
  } catch (const SolverError& e) {
    CHECK(e.last_residual() > 0.0);
  }
}
