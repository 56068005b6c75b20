#include "dftr/operator.hpp"

#include "dftr/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace dftr {

DiscreteGenerator::DiscreteGenerator(const SpatialGrid& grid, const ReactorParams& params,
                                     double alpha)
    : grid_(grid), params_(params), alpha_(alpha), matrix_(grid.size()) {
  validate(params);
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw ParameterError("alpha must lie in [0, 1/2], got " + std::to_string(alpha));
  }
  const Eigen::Index n = grid.size();
  const double h = grid.spacing();
  const double d = params.d_ax;
  const double v = params.v;
  const double diffusion = d / (h * h);
  const double advection = v / (2.0 * h);

  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    matrix_.lower[i] = diffusion + advection;
    matrix_.diag[i] = -2.0 * diffusion;
    matrix_.upper[i] = diffusion - advection;
  }

  // Ghost node xi_{-1} = xi_1 - 2 h beta xi_0 with beta = v (1 - alpha) / D_ax.
  const double beta = v * (1.0 - alpha) / d;
  matrix_.diag[0] = -2.0 * diffusion - 2.0 * d * beta / h - v * beta;
  matrix_.upper[0] = 2.0 * diffusion;

  // Ghost node from xi_N - xi_{N-2} = 2 h xi'(l) + (h^3 / 3) xi'''(l) with
  // xi'(l) = 0 and the outlet compatibility D_ax xi'''(l) = v xi''(l):
  //   (1 - eps) xi_N = (1 + eps) xi_{N-2} - 2 eps xi_{N-1},  eps = v h / (3 D_ax).
  const double eps = v * h / (3.0 * d);
  const double outlet = (2.0 * diffusion - v * eps / h) / (1.0 - eps);
  matrix_.lower[n - 1] = outlet;
  matrix_.diag[n - 1] = -outlet;
}

double DiscreteGenerator::inlet_defect(const Eigen::Ref<const Vector>& xi) const {
  const double h = grid_.spacing();
  const double slope = (-3.0 * xi[0] + 4.0 * xi[1] - xi[2]) / (2.0 * h);
  return (1.0 - alpha_) * xi[0] - params_.d_ax / params_.v * slope;
}

double DiscreteGenerator::outlet_defect(const Eigen::Ref<const Vector>& xi) const {
  const Eigen::Index n = xi.size();
  return (3.0 * xi[n - 1] - 4.0 * xi[n - 2] + xi[n - 3]) / (2.0 * grid_.spacing());
}

Profile DiscreteGenerator::project_to_domain(Vector values) const {
  const Eigen::Index n = grid_.size();
  const double ratio = params_.d_ax / (2.0 * grid_.spacing() * params_.v);
  values[0] = ratio * (4.0 * values[1] - values[2]) / ((1.0 - alpha_) + 3.0 * ratio);
  values[n - 1] = (4.0 * values[n - 2] - values[n - 3]) / 3.0;
  return Profile(grid_, std::move(values));
}

bool DiscreteGenerator::in_domain(const Eigen::Ref<const Vector>& xi, double tol) const {
  const double scale = xi.cwiseAbs().maxCoeff();
  const double h = grid_.spacing();
  const double inlet_scale = (1.0 - alpha_ + 4.0 * params_.d_ax / (params_.v * h)) * scale;
  const double outlet_scale = 4.0 * scale / h;
  return std::abs(inlet_defect(xi)) <= tol * inlet_scale &&
         std::abs(outlet_defect(xi)) <= tol * outlet_scale;
}

DiscreteGenerator build_generator(const SpatialGrid& grid, const ReactorParams& params,
                                  double alpha) {
  return DiscreteGenerator(grid, params, alpha);
}

Vector inlet_forcing(const SpatialGrid& grid, const ReactorParams& params, double inlet_value) {
  Vector b = Vector::Zero(grid.size());
  b[0] = (2.0 * params.v / grid.spacing() + params.v * params.v / params.d_ax) * inlet_value;
  return b;
}

DissipativityReport dissipativity_form(const DiscreteGenerator& gen, const Profile& xi,
                                      double domain_tol) {
  require_same_grid(gen.grid(), xi.grid, "dissipativity_form");
  if (!gen.in_domain(xi.values, domain_tol)) {
    throw ContractError("dissipativity_form: vector violates the discrete boundary conditions");
  }
  const auto& p = gen.params();
  const Vector& x = xi.values;
  const Eigen::Index n = x.size();
  const double h = gen.grid().spacing();

  DissipativityReport report;
  report.form = inner_product(gen.grid(), gen.apply(x), x);
  report.inlet_term = -p.v * (0.5 - gen.alpha()) * x[0] * x[0];
  const Vector slopes = (x.tail(n - 1) - x.head(n - 1)) / h;
  report.gradient_term = -p.d_ax * h * slopes.squaredNorm();
  report.outlet_term = -0.5 * p.v * x[n - 1] * x[n - 1];
  report.by_parts = report.inlet_term + report.gradient_term + report.outlet_term;
  return report;
}

Profile random_domain_vector(const DiscreteGenerator& gen, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Vector values(gen.grid().size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = uniform(rng);
  return gen.project_to_domain(std::move(values));
}

std::pair<double, double> characteristic_roots(const ReactorParams& params, double lambda_shift) {
  const double d = params.d_ax;
  const double v = params.v;
  const double root = std::sqrt(v * v + 4.0 * d * lambda_shift);
  // nu1 by the product of roots, avoiding cancellation in v - root.
  const double nu2 = (v + root) / (2.0 * d);
  const double nu1 = -lambda_shift / (d * nu2);
  return {nu1, nu2};
}

namespace {

// int_0^h exp(nu u) du and int_0^h u exp(nu u) du.
struct KernelMoments {
  double m0;
  double m1;
};

KernelMoments kernel_moments(double nu, double h) {
  const double z = nu * h;
  double phi0;
  double phi1;
  if (std::abs(z) < 1e-3) {
    phi0 = 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    phi1 = 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
  } else {
    const double em1 = std::expm1(z);
    phi0 = em1 / z;
    phi1 = (z * std::exp(z) - em1) / (z * z);
  }
  return {h * phi0, h * h * phi1};
}

struct ResolventCoefficients {
  double a11, a12, a21, a22;
};

// Rows: inlet condition, outlet condition. Unknowns: C3 and K = C4 exp(nu2 l).
ResolventCoefficients stable_system(const ReactorParams& params, double alpha, double nu1,
                                    double nu2) {
  const double ratio = params.d_ax / params.v;
  const double l = params.l;
  return {(1.0 - alpha) - ratio * nu1, std::exp(-nu2 * l) * ((1.0 - alpha) - ratio * nu2),
          nu1 * std::exp(nu1 * l), nu2};
}

}  // namespace

double resolvent_determinant(const ReactorParams& params, double alpha, double lambda_shift) {
  const auto [nu1, nu2] = characteristic_roots(params, lambda_shift);
  const auto s = stable_system(params, alpha, nu1, nu2);
  // In the (C3, C4) unknowns the determinant is -exp(nu2 l) times the one of
  // the (C3, K) system.
  return -(s.a11 * s.a22 - s.a12 * s.a21);
}

ResolventSolution resolvent_analytic(const Profile& eta, double lambda_shift,
                                     const ReactorParams& params, double alpha) {
  validate(params);
  if (!(lambda_shift > 0.0) || !std::isfinite(lambda_shift)) {
    throw ParameterError("resolvent shift must be positive, got " + std::to_string(lambda_shift));
  }
  const SpatialGrid& grid = eta.grid;
  const Eigen::Index n = grid.size();
  const double h = grid.spacing();
  const double d = params.d_ax;
  const double l = params.l;
  const auto [nu1, nu2] = characteristic_roots(params, lambda_shift);
  const double gap = d * (nu2 - nu1);
  const Vector& f = eta.values;

  // forward(x) = int_0^x eta(s) exp(nu1 (x - s)) ds
  // backward(x) = int_x^l eta(s) exp(nu2 (x - s)) ds
  Vector forward(n);
  Vector backward(n);
  const auto fwd = kernel_moments(nu1, h);
  const double fwd_decay = std::exp(nu1 * h);
  forward[0] = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double local = f[i + 1] * fwd.m0 + (f[i] - f[i + 1]) / h * fwd.m1;
    forward[i + 1] = fwd_decay * forward[i] + local;
  }
  const auto bwd = kernel_moments(-nu2, h);
  const double bwd_decay = std::exp(-nu2 * h);
  backward[n - 1] = 0.0;
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const double local = f[i] * bwd.m0 + (f[i + 1] - f[i]) / h * bwd.m1;
    backward[i] = bwd_decay * backward[i + 1] + local;
  }

  // Particular solution Q = -(forward + backward) / gap and its derivative.
  const Vector q = -(forward + backward) / gap;
  const Vector q_prime = -(nu1 * forward + nu2 * backward) / gap;

  const auto s = stable_system(params, alpha, nu1, nu2);
  const double det = s.a11 * s.a22 - s.a12 * s.a21;
  if (det == 0.0 || !std::isfinite(det)) {
    throw SolverError("resolvent boundary system is singular", det);
  }
  const double ratio = d / params.v;
  const double rhs_inlet = -(1.0 - alpha) * q[0] + ratio * q_prime[0];
  const double rhs_outlet = -q_prime[n - 1];
  const double c3 = (rhs_inlet * s.a22 - s.a12 * rhs_outlet) / det;
  const double k_scaled = (s.a11 * rhs_outlet - s.a21 * rhs_inlet) / det;

  const Vector x = grid.nodes();
  Vector xi(n);
  Vector xi_prime(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e1 = std::exp(nu1 * x[i]);
    const double e2 = std::exp(nu2 * (x[i] - l));
    xi[i] = q[i] + c3 * e1 + k_scaled * e2;
    xi_prime[i] = q_prime[i] + nu1 * c3 * e1 + nu2 * k_scaled * e2;
  }

  ResolventSolution out{.nu1 = nu1,
                        .nu2 = nu2,
                        .c3 = c3,
                        // Un-split form: C4 exp(nu2 x) absorbs int_0^l eta exp(nu2 (x - s)) / gap.
                        .c4 = k_scaled * std::exp(-nu2 * l) - backward[0] / gap,
                        .lambda_shift = lambda_shift,
                        .determinant = -det,
                        .xi = Profile(grid, std::move(xi)),
                        .xi_prime = std::move(xi_prime)};
  return out;
}

Profile resolvent_discrete(const DiscreteGenerator& gen, const Profile& eta, double lambda_shift) {
  require_same_grid(gen.grid(), eta.grid, "resolvent_discrete");
  if (!(lambda_shift > 0.0)) {
    throw ParameterError("resolvent shift must be positive, got " + std::to_string(lambda_shift));
  }
  const ThomasSolver<double> solver(gen.matrix().shifted(-lambda_shift, 1.0));
  return Profile(gen.grid(), solver.solve(eta.values));
}

}  // namespace dftr
