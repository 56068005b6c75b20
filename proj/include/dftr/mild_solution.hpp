#pragma once

#include "dftr/model.hpp"
#include "dftr/operator.hpp"
#include "dftr/steady_state.hpp"

namespace dftr {

struct PicardOptions {
  double tolerance = 1e-10;   ///< L2_h distance between successive iterates
  int max_iterations = 200;
};

/// Mild (Duhamel) solution
///
///   xi(t) = e^{t A_h} w0 + int_0^t e^{(t - s) A_h} r(xi(s)) ds
///
/// on `num_steps` uniform sub-intervals. The propagator is a dense matrix
/// exponential, the s-integral is the composite trapezoidal rule, and the
/// fixed point is found by Picard iteration. Meant for small grids only.
/// Throws SolverError when Picard does not contract.
Profile duhamel_oracle(const DiscreteGenerator& gen, const Profile& w0,
                       const SteadyStateSolution& steady, const ReactorParams& params,
                       double t_final, int num_steps, const PicardOptions& options = {});

/// e^{t A_h} w0 with a dense matrix exponential.
Profile propagate_linear(const DiscreteGenerator& gen, const Profile& w0, double t);

}  // namespace dftr
