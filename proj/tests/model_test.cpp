#include "dftr/errors.hpp"
#include "dftr/model.hpp"
#include "dftr/tridiagonal.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <random>

using namespace dftr;
using dftr::testing::nominal_params;

TEST_CASE("d_ax_from_peclet examples") {
  CHECK(d_ax_from_peclet(0.01, 1.0, 4.0) == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(d_ax_from_peclet(1.0, 1.0, 1.0) == 1.0);
  CHECK(d_ax_from_peclet(0.02, 2.0, 8.0) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK_THROWS_AS(d_ax_from_peclet(0.01, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(d_ax_from_peclet(-0.01, 1.0, 4.0), ParameterError);
}

TEST_CASE("saturate examples") {
  CHECK(saturate(3.0, 5.0) == 3.0);
  CHECK(saturate(7.0, 5.0) == 5.0);
  CHECK(saturate(-7.0, 5.0) == -5.0);
}

TEST_CASE("saturate is idempotent and bounded") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(-1e3, 1e3);
  std::uniform_real_distribution<double> m(1e-3, 1e2);
  for (int i = 0; i < 10000; ++i) {
    const double x = w(rng);
    const double bound = m(rng);
    const double once = saturate(x, bound);
    CHECK(saturate(once, bound) == once);
    CHECK(std::abs(once) <= bound);
  }
}

TEST_CASE("initial profile examples") {
  const ReactorParams p = nominal_params();
  CHECK(initial_value(0.0, p, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(initial_value(1.0, p, 0.0) == doctest::Approx(0.75).epsilon(1e-14));
  const Profile w0 = initial_profile(SpatialGrid(1.0, 201), p, FeedbackLaw{0.0, 1.0});
  CHECK(w0.values[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(w0.values[200] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(initial_profile(SpatialGrid(1.0, 11), p, FeedbackLaw{1.0, 1.0}), ParameterError);
}

TEST_CASE("initial profile satisfies both boundary conditions exactly") {
  for (double alpha : {0.0, 0.25, 0.5}) {
    for (double pe : {1.0, 4.0, 40.0}) {
      ReactorParams p = nominal_params();
      p.d_ax = d_ax_from_peclet(p.v, p.l, pe);
      // Exact slopes of -(x - l)^2 / 2 + c: w'(0) = l, w'(l) = 0.
      const double inlet = (1.0 - alpha) * initial_value(0.0, p, alpha) - (p.d_ax / p.v) * p.l;
      CHECK(std::abs(inlet) <= 1e-15 * initial_value(0.0, p, alpha));
      const double eps = 1e-6;
      const double slope_l = (initial_value(p.l + eps, p, alpha) - initial_value(p.l - eps, p, alpha)) / (2 * eps);
      CHECK(std::abs(slope_l) <= 1e-8);
    }
  }
}

TEST_CASE("lambda_theoretical examples and scaling") {
  CHECK(std::abs(lambda_theoretical(nominal_params()) - 0.0025) <= 1e-15);
  ReactorParams p;
  p.v = 4.0;
  p.d_ax = 1.0;
  CHECK(lambda_theoretical(p) == 1.0);
  p.v = 0.02;
  p.d_ax = 0.0025;
  CHECK(lambda_theoretical(p) == doctest::Approx(0.01).epsilon(1e-14));

  const ReactorParams base = nominal_params();
  for (double c : {0.5, 2.0, 3.7}) {
    ReactorParams scaled = base;
    scaled.v *= c;
    CHECK(lambda_theoretical(scaled) == doctest::Approx(c * c * lambda_theoretical(base)).epsilon(1e-14));
    scaled = base;
    scaled.d_ax *= c;
    CHECK(lambda_theoretical(scaled) == doctest::Approx(lambda_theoretical(base) / c).epsilon(1e-14));
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(nominal_params()));
  ReactorParams p = nominal_params();
  p.k = 0.0;
  CHECK_NOTHROW(validate(p));
  p.t_final = 0.0;
  CHECK_NOTHROW(validate(p));
  p = nominal_params();
  p.v = 0.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = nominal_params();
  p.d_ax = std::nan("");
  CHECK_THROWS_AS(validate(p), ParameterError);
  p = nominal_params();
  p.k = -1.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
  CHECK_NOTHROW(validate(FeedbackLaw{0.5, 1.0}));
  CHECK_THROWS_AS(validate(FeedbackLaw{0.6, 1.0}), ParameterError);
  CHECK_THROWS_AS(validate(FeedbackLaw{-0.1, 1.0}), ParameterError);
}

TEST_CASE("grid and quadrature") {
  const SpatialGrid grid(2.0, 5);
  CHECK(grid.spacing() == 0.5);
  CHECK(grid.node(4) == 2.0);
  CHECK(grid.trapezoid_weights().sum() == doctest::Approx(2.0));
  CHECK(trapezoid(grid, Vector::Ones(5)) == doctest::Approx(2.0));
  CHECK(trapezoid(grid, grid.nodes()) == doctest::Approx(2.0));
  CHECK_THROWS(SpatialGrid(1.0, 2));
  CHECK_THROWS_AS(require_same_grid(grid, SpatialGrid(2.0, 7), "test"), ContractError);
  CHECK_THROWS(Profile(grid, Vector::Ones(4)));
}

TEST_CASE("reaction terms") {
  const ReactorParams p = nominal_params(2.0);
  CHECK(reaction_rate(2.0, 0.5, 2.0) == 2.0);
  CHECK(reaction_rate(-1.0, 0.5, 0.5) == 0.0);
  CHECK(deviation_reaction(0.0, 0.7, p) == 0.0);
  // Small deviations: r(w) ~ -k n Cbar^{n-1} w with full relative accuracy.
  const double w = 1e-14;
  const double c = 0.7;
  CHECK(deviation_reaction(w, c, p) == doctest::Approx(-p.k * 2.0 * c * w).epsilon(1e-12));
  ReactorParams saturated = p;
  saturated.sat_m = 0.1;
  CHECK(deviation_reaction(5.0, c, saturated) == doctest::Approx(deviation_reaction(0.1, c, saturated)));
}

TEST_CASE("default saturation bound is inactive on the initial profile") {
  const ReactorParams p = nominal_params();
  CHECK(default_saturation_bound(p, 0.0) == doctest::Approx(7.5));
}

TEST_CASE("Thomas solver matches a dense solve") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tridiagonal<double> m(12);
  for (Eigen::Index i = 0; i < 12; ++i) {
    m.lower[i] = u(rng);
    m.upper[i] = u(rng);
    m.diag[i] = 4.0 + u(rng);
  }
  Vector rhs(12);
  for (auto& x : rhs) x = u(rng);
  const Vector x = ThomasSolver<double>(m).solve(rhs);
  const Vector ref = m.dense().partialPivLu().solve(rhs);
  CHECK((x - ref).norm() <= 1e-13 * ref.norm());
  CHECK((m.apply(x) - rhs).norm() <= 1e-13 * rhs.norm());
  Tridiagonal<double> singular(3);
  CHECK_THROWS_AS(ThomasSolver<double>{singular}, std::domain_error);
}
