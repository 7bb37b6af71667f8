#pragma once

#include <vector>

#include "sbos/inner.hpp"
#include "sbos/selection.hpp"

namespace sbos {

// Data-driven product family: system i sells at price p_i with cost c_i
// against Poisson(lambda_i) demand. The SAA problem has a closed form: the
// empirical (p-c)/p quantile maximizes the piecewise-linear empirical
// objective.
struct NewsvendorParams {
  int system_count = 16;
  // Defaults follow p_i = i/2 + 5, c_i = i/5 + 1, lambda_i = 250 - 6 i.
  // Explicit vectors, when non-empty, override the formulas.
  std::vector<double> prices;
  std::vector<double> costs;
  std::vector<double> rates;

  bool operator==(const NewsvendorParams&) const = default;
};

// Fills prices/costs/rates from the default formulas where empty and
// validates p > c > 0, lambda > 0.
NewsvendorParams resolve_newsvendor(const NewsvendorParams& params);

ProblemList make_newsvendor_problems(const NewsvendorParams& params);

// Exact oracle: q* is the smallest integer with Poisson CDF >= (p-c)/p;
// value is p E[min(q*,X)] - c q* by direct pmf summation.
double newsvendor_true_value(double price, double cost, double rate);
long newsvendor_optimal_quantity(double price, double cost, double rate);

// Closed-form SAA on one sample set; exposed for oracle cross-checks.
double newsvendor_saa_value(double price, double cost,
                            const std::vector<double>& samples);
double newsvendor_saa_quantity(double price, double cost,
                               const std::vector<double>& samples);

// Poisson CDF P(X <= k) by pmf recursion.
double poisson_cdf(long k, double rate);

}  // namespace sbos
