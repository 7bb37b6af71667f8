#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbos/rng.hpp"

namespace sbos {

// One-dimensional decision interval.
struct FeasibleBox {
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const FeasibleBox&) const = default;

  double clamp(double x) const {
    if (x < lower) return lower;
    if (x > upper) return upper;
    return x;
  }
  double width() const { return upper - lower; }
};

struct SgdState {
  double iterate = 0.0;
  double step = 0.0;
  double value_sum = 0.0;
  int64_t steps_taken = 0;
};

struct ValueEstimate {
  double v_hat = 0.0;
  int64_t sample_count = 0;
};

// Append-only i.i.d. data for one system.
class SampleStore {
 public:
  void append(double x) { draws_.push_back(x); }
  const std::vector<double>& draws() const { return draws_; }
  int64_t count() const { return static_cast<int64_t>(draws_.size()); }
  bool empty() const { return draws_.empty(); }

 private:
  std::vector<double> draws_;
};

// One stochastic (value, gradient) observation and the number of raw
// function evaluations it consumed (2 for finite-difference gradients).
struct GradientSample {
  double value = 0.0;
  double gradient = 0.0;
  int evals = 1;
};

enum class InnerMode { kGradient, kDataDriven };

// Contract for one system's inner optimization. Gradient-mode problems
// expose stochastic (value, gradient) sampling plus point evaluation;
// data-driven problems expose i.i.d. draws and an exact SAA solver.
// Implementations are immutable after construction; all randomness comes
// from the caller's stream, so concurrent sampling is safe.
class InnerProblem {
 public:
  virtual ~InnerProblem() = default;

  virtual FeasibleBox feasible() const = 0;
  virtual InnerMode mode() const = 0;

  // Raw evaluations consumed per (value, gradient) sample: 1 when the
  // gradient comes with the value, 2 for finite differences.
  virtual int evals_per_sample() const { return 1; }

  // Gradient mode.
  virtual GradientSample sample(double x, RngStream& rng) const;
  virtual double evaluate(double x, RngStream& rng) const;

  // Data-driven mode.
  virtual double draw(RngStream& rng) const;
  virtual ValueEstimate saa_value(const SampleStore& store) const;

  // Exact optimizing performance, when derivable.
  virtual std::optional<double> true_value() const { return std::nullopt; }
};

// One projected ascent step: clamp(x + step * gradient) into the box.
SgdState sgd_step(const SgdState& state, double gradient, const FeasibleBox& box);

struct SgdPhaseResult {
  ValueEstimate estimate;
  double final_iterate = 0.0;
  int64_t evaluations = 0;
};

// Runs `steps` projected SGD iterations at constant step gamma0/sqrt(steps),
// averaging the value observed at each pre-update iterate.
SgdPhaseResult run_sgd_phase(const InnerProblem& problem, double start,
                             int64_t steps, double gamma0, RngStream& rng);

struct FdGradient {
  double value_at_x = 0.0;
  double gradient_estimate = 0.0;
  int evals = 2;
};

// Backward difference (F(x) - F(x - delta)) / delta. With
// common_random_numbers both evaluations replay the identical stream so
// decision-independent noise cancels exactly. The lower point is clamped
// into the box and the effective delta recomputed; at the lower boundary
// the difference flips forward.
FdGradient fd_gradient(const InnerProblem& problem, double x, double delta,
                       bool common_random_numbers, RngStream& rng);

// Exact maximum of the empirical objective over the problem's function
// class, delegated to the problem's solver.
ValueEstimate solve_saa(const InnerProblem& problem, const SampleStore& store);

}  // namespace sbos
