#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sbos/problems/dosage.hpp"
#include "sbos/problems/newsvendor.hpp"
#include "sbos/problems/synthetic.hpp"
#include "sbos/rng.hpp"

using namespace sbos;

TEST_CASE("dosage vertex value and optimizer") {
  const DosageParams params;
  CHECK(dosage_true_value(params, 0.0) == doctest::Approx(12.347222222222221));
  CHECK(dosage_true_value(params, 0.1) == doctest::Approx(13.581944444444444));
  CHECK(dosage_optimal_dose(params) == doctest::Approx(575.0 / 18.0));
  CHECK_THROWS_AS(dosage_true_value(params, -1.5), std::domain_error);
}

TEST_CASE("dosage noiseless evaluation matches the negated quadratic") {
  DosageParams params;
  params.system_count = 1;
  params.noise_sd = 0.0;
  const ProblemList problems = make_dosage_problems(params, {0.0});
  RngStream rng(1);
  const double q = 575.0 / 18.0;
  CHECK(problems[0]->evaluate(q, rng) == doctest::Approx(12.347222222222221));
  CHECK(*problems[0]->true_value() == doctest::Approx(12.347222222222221));
  CHECK(problems[0]->evals_per_sample() == 2);
}

TEST_CASE("dosage oracle equals brute-force grid search") {
  const DosageParams params;
  RngStream rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const double u = rng.uniform(-0.1, 0.1);
    const double a = (1.0 + u) * params.a_star;
    const double b = (1.0 + u) * params.b_star;
    const double c = (1.0 + u) * params.c_star;
    double best = -1e300;
    for (double q = 0.0; q <= 50.0; q += 1e-3)
      best = std::max(best, -(a * q * q + b * q + c));
    REQUIRE(std::fabs(dosage_true_value(params, u) - best) < 1e-6);
  }
}

TEST_CASE("dosage backward difference of the noiseless quadratic") {
  DosageParams params;
  params.system_count = 1;
  params.noise_sd = 0.0;
  const ProblemList problems = make_dosage_problems(params, {0.0});
  RngStream rng(3);
  const GradientSample s = problems[0]->sample(25.0, rng);
  // Exact FD of a quadratic: -(2 a (q - delta/2) + b).
  CHECK(s.gradient == doctest::Approx(0.1036));
  CHECK(s.evals == 2);
}

TEST_CASE("noisy dosage gradient is centered with variance near 8") {
  DosageParams params;
  params.system_count = 1;
  const ProblemList problems = make_dosage_problems(params, {0.0});
  RngStream rng(4);
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = problems[0]->sample(25.0, rng).gradient;
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double se = std::sqrt(8.0 / n);
  CHECK(std::fabs(mean - 0.1036) < 3.0 * se);
  CHECK(var == doctest::Approx(8.0).epsilon(0.06));
}

TEST_CASE("newsvendor defaults follow the stated formulas") {
  const NewsvendorParams resolved = resolve_newsvendor({});
  CHECK(resolved.prices[0] == doctest::Approx(5.5));
  CHECK(resolved.costs[0] == doctest::Approx(1.2));
  CHECK(resolved.rates[0] == doctest::Approx(244.0));
  CHECK(resolved.prices[15] == doctest::Approx(13.0));
  CHECK(resolved.rates[15] == doctest::Approx(154.0));

  NewsvendorParams bad;
  bad.system_count = 42;  // rate formula goes nonpositive past i = 41
  CHECK_THROWS_AS(resolve_newsvendor(bad), std::invalid_argument);
}

TEST_CASE("newsvendor draw matches Poisson moments") {
  const ProblemList problems = make_newsvendor_problems({});
  RngStream rng(5);
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = problems[0]->draw(rng);  // rate 244
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean - 244.0) < 3.0 * std::sqrt(244.0 / n));
  CHECK(std::fabs(var - 244.0) <
        3.0 * std::sqrt((244.0 + 2.0 * 244.0 * 244.0) / n));
}

TEST_CASE("newsvendor oracle worked example") {
  CHECK(newsvendor_optimal_quantity(2.0, 1.0, 1.0) == 1);
  const double expected = 2.0 * (1.0 - std::exp(-1.0)) - 1.0;
  CHECK(newsvendor_true_value(2.0, 1.0, 1.0) == doctest::Approx(expected));
  CHECK(newsvendor_true_value(2.0, 1.0, 1.0) == doctest::Approx(0.26424).epsilon(1e-4));

  // Vanishing margin: order nothing, earn nothing.
  CHECK(newsvendor_optimal_quantity(2.0, 2.0 - 1e-12, 5.0) == 0);
  CHECK(newsvendor_true_value(2.0, 2.0 - 1e-12, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("newsvendor oracle equals brute force for all sixteen systems") {
  const NewsvendorParams params = resolve_newsvendor({});
  for (int i = 0; i < params.system_count; ++i) {
    const double p = params.prices[i];
    const double c = params.costs[i];
    const double rate = params.rates[i];
    const long q_max =
        static_cast<long>(rate + 10.0 * std::sqrt(rate)) + 1;

    // Brute force over order quantities with exact partial expectations.
    double best_value = -1e300;
    long best_q = -1;
    for (long q = 0; q <= q_max; ++q) {
      double pmf = std::exp(-rate);
      double partial = 0.0, cdf_below = 0.0;
      for (long k = 0; k < q; ++k) {
        if (k > 0) pmf *= rate / static_cast<double>(k);
        partial += static_cast<double>(k) * pmf;
        cdf_below += pmf;
      }
      const double value =
          p * (partial + static_cast<double>(q) * (1.0 - cdf_below)) -
          c * static_cast<double>(q);
      if (value > best_value) {
        best_value = value;
        best_q = q;
      }
    }
    REQUIRE(newsvendor_optimal_quantity(p, c, rate) == best_q);
    REQUIRE(std::fabs(newsvendor_true_value(p, c, rate) - best_value) < 1e-10);
  }
}

TEST_CASE("newsvendor oracle agrees with Monte Carlo") {
  const NewsvendorParams params = resolve_newsvendor({});
  RngStream rng(6);
  for (int i = 0; i < params.system_count; ++i) {
    const double p = params.prices[i];
    const double c = params.costs[i];
    const double rate = params.rates[i];
    const long q = newsvendor_optimal_quantity(p, c, rate);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < n; ++rep) {
      const double x = static_cast<double>(rng.poisson(rate));
      const double value =
          p * std::min(static_cast<double>(q), x) - c * static_cast<double>(q);
      sum += value;
      sum_sq += value * value;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    REQUIRE(std::fabs(mean - newsvendor_true_value(p, c, rate)) < 3.0 * se);
  }
}

TEST_CASE("SAA value converges toward the oracle as data accumulates") {
  const double p = 5.5, c = 1.2, rate = 100.0;
  const double truth = newsvendor_true_value(p, c, rate);
  int improved = 0;
  for (int pair = 0; pair < 100; ++pair) {
    RngStream rng = derive_stream(77, pair, "saa-consistency");
    std::vector<double> small(100), large(10000);
    for (double& x : small) x = static_cast<double>(rng.poisson(rate));
    for (double& x : large) x = static_cast<double>(rng.poisson(rate));
    const double err_small = std::fabs(newsvendor_saa_value(p, c, small) - truth);
    const double err_large = std::fabs(newsvendor_saa_value(p, c, large) - truth);
    improved += err_large < err_small ? 1 : 0;
  }
  CHECK(improved >= 95);
}

TEST_CASE("synthetic family exposes gaps and complexity") {
  SyntheticParams params;
  params.gaps = {0.0, 0.5, 0.5, 1.0};
  params.noise_sd = 0.0;
  const ProblemList problems = synthetic_gaussian_family(params);
  CHECK(*problems[0]->true_value() == 0.0);
  CHECK(*problems[1]->true_value() == -0.5);
  CHECK(*problems[3]->true_value() == -1.0);
  CHECK(h2_complexity(params.gaps) == doctest::Approx(12.0));

  // Brute-force maximum over ranks matches.
  double brute = 0.0;
  for (size_t i = 1; i < params.gaps.size(); ++i)
    brute = std::max(brute,
                     static_cast<double>(i + 1) / (params.gaps[i] * params.gaps[i]));
  CHECK(h2_complexity(params.gaps) == doctest::Approx(brute));

  SyntheticParams bad;
  bad.gaps = {0.0, 0.0};
  CHECK_THROWS_AS(synthetic_gaussian_family(bad), std::invalid_argument);
}

TEST_CASE("grid trap: first two systems agree on-grid, differ off-grid") {
  GridTrapParams params;
  params.noise_sd = 0.0;
  params.gradient_noise_sd = 0.0;
  const ProblemList problems = grid_trap_family(params);
  RngStream rng(7);
  for (const double x : params.grid) {
    const double v1 = problems[0]->evaluate(x, rng);
    const double v2 = problems[1]->evaluate(x, rng);
    REQUIRE(v1 == v2);
    // Decoys sit strictly below at every grid point.
    REQUIRE(problems[2]->evaluate(x, rng) < v1);
    REQUIRE(problems[3]->evaluate(x, rng) < v1);
  }
  const double peak = 0.5;
  CHECK(problems[0]->evaluate(peak, rng) == doctest::Approx(0.0));
  CHECK(problems[1]->evaluate(peak, rng) == doctest::Approx(-0.4));
  CHECK(*problems[0]->true_value() == doctest::Approx(0.0));
  CHECK(*problems[1]->true_value() == doctest::Approx(-0.4));
  CHECK(*problems[2]->true_value() < *problems[1]->true_value());

  // Gradient points toward the hidden peak for system 1 and vanishes on
  // system 2's plateau.
  CHECK(problems[0]->sample(0.45, rng).gradient == doctest::Approx(4.0));
  CHECK(problems[1]->sample(0.45, rng).gradient == doctest::Approx(0.0));
}
