#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbos/inner.hpp"
#include "sbos/selection.hpp"

namespace sbos {

// Two-station tandem service system with K+1 staff. System x places x
// servers at Station One and K+1-x at Station Two. Customers arrive from a
// non-stationary Poisson process on [0,H], accept the posted price with
// probability 1-p, wait FIFO, and abandon Station One's queue once their
// gamma patience runs out. Service pairs are correlated lognormals.
struct QueueingParams {
  int staff_pool = 16;  // K
  double lambda0 = 1.0;
  double horizon = 2000.0;  // H
  // Lognormal service parameters; unset means mu1 = log(10K), mu2 = log(2K).
  std::optional<double> mu1;
  std::optional<double> mu2;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.5;
  std::optional<double> patience_shape;  // alpha_a, default 2*mu1
  double patience_rate = 1.0;            // beta_a
  double wait_penalty = 1.0;             // c
  double fd_delta = 0.03;                // price finite-difference step
  // Resolved open questions, kept configurable: abandoning customers add
  // their patience to W, and D counts completions of both services.
  bool wait_includes_abandoned = true;
  bool count_station_one_completions = false;

  bool operator==(const QueueingParams&) const = default;
};

struct ResolvedQueueing {
  int staff_pool;
  double lambda0;
  double horizon;
  double mu1, mu2, sigma1, sigma2, rho;
  double patience_shape, patience_rate;
  double wait_penalty;
  double fd_delta;
  bool wait_includes_abandoned;
  bool count_station_one_completions;
};

ResolvedQueueing resolve_queueing(const QueueingParams& params);

struct SimOutput {
  int64_t completed = 0;        // D
  double total_wait = 0.0;      // W, queueing time at both stations
  int64_t arrivals_entered = 0; // accepted the price
  int64_t abandoned = 0;
  double reward = 0.0;          // p*D - c*W
};

struct ServiceEvent {
  int station = 0;  // 1 or 2
  double arrival = 0.0;
  double start = 0.0;
  double end = 0.0;
};

struct SimLog {
  std::vector<ServiceEvent> services;
  std::vector<double> abandon_times;
};

// lambda(t) = lambda0 * t (H - t) / H^2 on [0,H]; its maximum is lambda0/4.
double nhpp_rate(double lambda0, double horizon, double t);

// Thinned arrival times: candidates at the envelope rate lambda0/4, kept
// with probability lambda(t)/(lambda0/4), then with acceptance_prob.
std::vector<double> nhpp_arrivals(double lambda0, double horizon,
                                  double acceptance_prob, RngStream& rng);

struct Entrant {
  double arrival = 0.0;
  double service1 = 0.0;
  double service2 = 0.0;
  double patience = 0.0;
};

// FIFO processing of already-admitted customers through both stations;
// exposed so tests can audit hand-built scenarios.
SimOutput process_stations(const std::vector<Entrant>& entrants,
                           int servers_one, int servers_two, double price,
                           const ResolvedQueueing& params, SimLog* log = nullptr);

// One full simulation run. The same seed replays identical candidate
// arrivals and marks, which is what makes common-random-number pairs line
// up across prices.
SimOutput simulate_queueing(const ResolvedQueueing& params,
                            int servers_station_one, double price,
                            uint64_t seed, SimLog* log = nullptr);

// Backward-difference (value, gradient) pair at prices p and p-delta run on
// the identical seed; costs two evaluations.
std::pair<double, double> queueing_sample(const ResolvedQueueing& params,
                                          int servers_station_one, double price,
                                          uint64_t seed);

ProblemList make_queueing_problems(const QueueingParams& params);

}  // namespace sbos
