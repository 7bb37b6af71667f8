#pragma once

#include <vector>

#include "sbos/inner.hpp"
#include "sbos/selection.hpp"

namespace sbos {

// Dose-response family: system i maximizes the negated perturbed quadratic
// -( a_i q^2 + b_i q + c_i ) with [a_i,b_i,c_i] = (1+u_i) * [a*,b*,c*] and
// unit Gaussian observation noise. Gradients come from a backward finite
// difference over two independent draws, so one sample costs two
// evaluations.
struct DosageParams {
  int system_count = 16;
  double a_star = 9.0 / 1250.0;
  double b_star = -23.0 / 50.0;
  double c_star = -5.0;
  double perturbation_range = 0.1;  // u_i uniform on [-range, range]
  double noise_sd = 1.0;
  double fd_delta = 0.5;
  FeasibleBox box{0.0, 50.0};

  bool operator==(const DosageParams&) const = default;
};

// Uniform perturbations on [-range, range], one per system.
std::vector<double> draw_dosage_perturbations(int k, double range, RngStream& rng);

ProblemList make_dosage_problems(const DosageParams& params,
                                 const std::vector<double>& perturbations);

// Exact optimum (1+u) * (b*^2/(4 a*) - c*) of the negated quadratic.
double dosage_true_value(const DosageParams& params, double perturbation);

// Vertex abscissa -b*/(2 a*); independent of the perturbation.
double dosage_optimal_dose(const DosageParams& params);

}  // namespace sbos
