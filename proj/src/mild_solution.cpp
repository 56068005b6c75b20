#include "dftr/mild_solution.hpp"

#include "dftr/errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dftr {

namespace {

constexpr Eigen::Index kMaxDenseNodes = 101;

void require_small(const DiscreteGenerator& gen) {
  if (gen.grid().size() > kMaxDenseNodes) {
    throw ContractError("dense propagator limited to " + std::to_string(kMaxDenseNodes) + " nodes");
  }
}

}  // namespace

Profile propagate_linear(const DiscreteGenerator& gen, const Profile& w0, double t) {
  require_small(gen);
  require_same_grid(gen.grid(), w0.grid, "propagate_linear");
  const Eigen::MatrixXd propagator = (t * gen.matrix().dense()).exp();
  return Profile(gen.grid(), propagator * w0.values);
}

Profile duhamel_oracle(const DiscreteGenerator& gen, const Profile& w0,
                       const SteadyStateSolution& steady, const ReactorParams& params,
                       double t_final, int num_steps, const PicardOptions& options) {
  require_small(gen);
  require_same_grid(gen.grid(), w0.grid, "duhamel_oracle");
  require_same_grid(gen.grid(), steady.profile.grid, "duhamel_oracle");
  if (!(t_final >= 0.0) || num_steps < 1) {
    throw ParameterError("duhamel_oracle needs t_final >= 0 and at least one step");
  }
  const double tau = t_final / num_steps;
  const Eigen::MatrixXd step = (tau * gen.matrix().dense()).exp();
  const Vector& c_bar = steady.profile.values;
  const auto count = static_cast<std::size_t>(num_steps) + 1;

  std::vector<Vector> linear(count);
  linear[0] = w0.values;
  for (std::size_t j = 1; j < count; ++j) linear[j] = step * linear[j - 1];

  std::vector<Vector> iterate = linear;
  std::vector<Vector> reaction(count);
  double change = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    for (std::size_t j = 0; j < count; ++j) reaction[j] = deviation_reaction(iterate[j], c_bar, params);

    // I_j = e^{tau A} I_{j-1} + tau/2 (e^{tau A} r_{j-1} + r_j)
    Vector integral = Vector::Zero(w0.values.size());
    change = 0.0;
    for (std::size_t j = 1; j < count; ++j) {
      integral = step * (integral + 0.5 * tau * reaction[j - 1]) + 0.5 * tau * reaction[j];
      Vector next = linear[j] + integral;
      const Vector diff = next - iterate[j];
      change = std::max(change, std::sqrt(inner_product(gen.grid(), diff, diff)));
      iterate[j] = std::move(next);
    }
    if (change <= options.tolerance) return Profile(gen.grid(), iterate.back());
  }
  throw SolverError("Picard iteration did not converge in " +
                        std::to_string(options.max_iterations) + " iterations",
                    change);
}

}  // namespace dftr
