#include "sbos/inner.hpp"

#include <cmath>
#include <stdexcept>

namespace sbos {

GradientSample InnerProblem::sample(double, RngStream&) const {
  throw std::logic_error("problem does not expose gradient sampling");
}

double InnerProblem::evaluate(double, RngStream&) const {
  throw std::logic_error("problem does not expose point evaluation");
}

double InnerProblem::draw(RngStream&) const {
  throw std::logic_error("problem does not expose data draws");
}

ValueEstimate InnerProblem::saa_value(const SampleStore&) const {
  throw std::logic_error("problem does not expose an SAA solver");
}

SgdState sgd_step(const SgdState& state, double gradient, const FeasibleBox& box) {
  if (state.step <= 0.0) throw std::invalid_argument("sgd_step: step must be > 0");
  if (!std::isfinite(gradient))
    throw std::domain_error("sgd_step: non-finite gradient");
  SgdState next = state;
  next.iterate = box.clamp(state.iterate + state.step * gradient);
  next.steps_taken = state.steps_taken + 1;
  return next;
}

SgdPhaseResult run_sgd_phase(const InnerProblem& problem, double start,
                             int64_t steps, double gamma0, RngStream& rng) {
  if (steps < 1) throw std::invalid_argument("run_sgd_phase: steps must be >= 1");
  if (gamma0 <= 0.0)
    throw std::invalid_argument("run_sgd_phase: gamma0 must be > 0");
  const FeasibleBox box = problem.feasible();
  SgdState state;
  state.iterate = box.clamp(start);
  state.step = gamma0 / std::sqrt(static_cast<double>(steps));

  SgdPhaseResult result;
  for (int64_t t = 0; t < steps; ++t) {
    const GradientSample obs = problem.sample(state.iterate, rng);
    state.value_sum += obs.value;
    result.evaluations += obs.evals;
    state = sgd_step(state, obs.gradient, box);
  }
  result.estimate.v_hat = state.value_sum / static_cast<double>(steps);
  result.estimate.sample_count = steps;
  result.final_iterate = state.iterate;
  return result;
}

FdGradient fd_gradient(const InnerProblem& problem, double x, double delta,
                       bool common_random_numbers, RngStream& rng) {
  if (delta <= 0.0) throw std::invalid_argument("fd_gradient: delta must be > 0");
  const FeasibleBox box = problem.feasible();
  const double xc = box.clamp(x);
  double hi = xc;
  double lo = box.clamp(xc - delta);
  bool forward = false;
  if (hi - lo <= 0.0) {
    // Pinned at the lower bound: difference forward instead.
    forward = true;
    lo = xc;
    hi = box.clamp(xc + delta);
    if (hi - lo <= 0.0)
      throw std::invalid_argument("fd_gradient: box too narrow for delta");
  }

  FdGradient out;
  double f_hi, f_lo;
  if (common_random_numbers) {
    const uint64_t seed = rng.next_u64();
    RngStream a(seed), b(seed);
    f_hi = problem.evaluate(hi, a);
    f_lo = problem.evaluate(lo, b);
  } else {
    f_hi = problem.evaluate(hi, rng);
    f_lo = problem.evaluate(lo, rng);
  }
  out.value_at_x = forward ? f_lo : f_hi;
  out.gradient_estimate = (f_hi - f_lo) / (hi - lo);
  out.evals = 2;
  return out;
}

ValueEstimate solve_saa(const InnerProblem& problem, const SampleStore& store) {
  if (store.empty()) throw std::invalid_argument("solve_saa: empty sample store");
  return problem.saa_value(store);
}

}  // namespace sbos
