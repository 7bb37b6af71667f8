#pragma once

#include <vector>

#include "sbos/inner.hpp"
#include "sbos/selection.hpp"

namespace sbos {

// Calibration family: system i is a concave quadratic with known optimum
// v_i = top_value - gaps[i-1], additive Gaussian value noise, and a direct
// (one-evaluation) stochastic gradient. Optima are spread across the box so
// the inner search is not free.
struct SyntheticParams {
  std::vector<double> gaps;  // gaps[0] must be 0; gaps[i] > 0 for i >= 1
  double noise_sd = 1.0;
  double gradient_noise_sd = -1.0;  // < 0 means "same as noise_sd"
  double curvature = 1.0;
  double top_value = 0.0;
  FeasibleBox box{-1.0, 1.0};

  bool operator==(const SyntheticParams&) const = default;
};

ProblemList synthetic_gaussian_family(const SyntheticParams& params);

// Convenience: K systems with uniform gap `gap` below the best.
SyntheticParams synthetic_uniform_gaps(int k, double gap, double noise_sd);

// H2(v) = max_{i>1} i / gaps[i-1]^2 with systems listed best-first.
double h2_complexity(const std::vector<double>& gaps);

// Adversarial instance for grid-based allocation: systems 1 and 2 have
// identical means at every grid point, but system 1 hides its peak between
// grid[gap_index] and grid[gap_index+1] while system 2 is flat there.
// Remaining systems are the same tent shifted down by decoy_offset steps.
struct GridTrapParams {
  int system_count = 4;
  std::vector<double> grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int gap_index = 2;  // peak centered in (grid[2], grid[3])
  double slope = 4.0;
  double noise_sd = 0.5;
  double gradient_noise_sd = 0.5;
  double decoy_offset = 0.5;

  bool operator==(const GridTrapParams&) const = default;
};

ProblemList grid_trap_family(const GridTrapParams& params);

}  // namespace sbos
