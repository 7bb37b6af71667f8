#include "sbos/problems/dosage.hpp"

#include <cmath>
#include <stdexcept>

namespace sbos {

namespace {

class DosageProblem final : public InnerProblem {
 public:
  DosageProblem(const DosageParams& params, double perturbation)
      : box_(params.box),
        a_((1.0 + perturbation) * params.a_star),
        b_((1.0 + perturbation) * params.b_star),
        c_((1.0 + perturbation) * params.c_star),
        noise_sd_(params.noise_sd),
        fd_delta_(params.fd_delta) {
    if (a_ <= 0.0) throw std::domain_error("dosage: quadratic must stay convex");
  }

  FeasibleBox feasible() const override { return box_; }
  InnerMode mode() const override { return InnerMode::kGradient; }
  int evals_per_sample() const override { return 2; }

  double evaluate(double q, RngStream& rng) const override {
    double v = -(a_ * q * q + b_ * q + c_);
    if (noise_sd_ > 0.0) v += noise_sd_ * rng.normal();
    return v;
  }

  GradientSample sample(double q, RngStream& rng) const override {
    // Independent noise in the two evaluations; no common random numbers.
    const FdGradient fd = fd_gradient(*this, q, fd_delta_, false, rng);
    return {fd.value_at_x, fd.gradient_estimate, fd.evals};
  }

  std::optional<double> true_value() const override {
    return b_ * b_ / (4.0 * a_) - c_;
  }

 private:
  FeasibleBox box_;
  double a_, b_, c_;
  double noise_sd_;
  double fd_delta_;
};

}  // namespace

std::vector<double> draw_dosage_perturbations(int k, double range,
                                              RngStream& rng) {
  if (k < 1) throw std::invalid_argument("dosage: need at least one system");
  if (range < 0.0) throw std::invalid_argument("dosage: range must be >= 0");
  std::vector<double> u(k);
  for (double& ui : u) ui = rng.uniform(-range, range);
  return u;
}

ProblemList make_dosage_problems(const DosageParams& params,
                                 const std::vector<double>& perturbations) {
  if (perturbations.size() != static_cast<size_t>(params.system_count))
    throw std::invalid_argument("dosage: one perturbation per system required");
  if (params.fd_delta <= 0.0)
    throw std::invalid_argument("dosage: fd_delta must be > 0");
  ProblemList problems;
  problems.reserve(perturbations.size());
  for (double u : perturbations)
    problems.push_back(std::make_unique<DosageProblem>(params, u));
  return problems;
}

double dosage_true_value(const DosageParams& params, double perturbation) {
  const double a = (1.0 + perturbation) * params.a_star;
  if (a <= 0.0) throw std::domain_error("dosage: quadratic must stay convex");
  return (1.0 + perturbation) *
         (params.b_star * params.b_star / (4.0 * params.a_star) - params.c_star);
}

double dosage_optimal_dose(const DosageParams& params) {
  return -params.b_star / (2.0 * params.a_star);
}

}  // namespace sbos
