#include "sbos/problems/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace sbos {

namespace {

using MinHeap = std::priority_queue<double, std::vector<double>, std::greater<>>;

MinHeap idle_servers(int count) {
  return MinHeap(std::greater<>(), std::vector<double>(count, 0.0));
}

class QueueingProblem final : public InnerProblem {
 public:
  QueueingProblem(const ResolvedQueueing& params, int servers_station_one)
      : params_(params), servers_(servers_station_one) {}

  FeasibleBox feasible() const override { return {0.0, 1.0}; }
  InnerMode mode() const override { return InnerMode::kGradient; }
  int evals_per_sample() const override { return 2; }

  double evaluate(double price, RngStream& rng) const override {
    return simulate_queueing(params_, servers_, price, rng.next_u64()).reward;
  }

  GradientSample sample(double price, RngStream& rng) const override {
    const auto [value, gradient] =
        queueing_sample(params_, servers_, price, rng.next_u64());
    return {value, gradient, 2};
  }

 private:
  ResolvedQueueing params_;
  int servers_;
};

}  // namespace

ResolvedQueueing resolve_queueing(const QueueingParams& params) {
  if (params.staff_pool < 1)
    throw std::invalid_argument("queueing: staff_pool must be >= 1");
  if (params.lambda0 < 0.0)
    throw std::invalid_argument("queueing: lambda0 must be >= 0");
  if (params.horizon <= 0.0)
    throw std::invalid_argument("queueing: horizon must be > 0");
  if (params.sigma1 <= 0.0 || params.sigma2 <= 0.0)
    throw std::invalid_argument("queueing: service sigmas must be > 0");
  if (std::fabs(params.rho) >= 1.0)
    throw std::invalid_argument("queueing: |rho| must be < 1");
  if (params.patience_rate <= 0.0)
    throw std::invalid_argument("queueing: patience_rate must be > 0");
  if (params.wait_penalty < 0.0)
    throw std::invalid_argument("queueing: wait_penalty must be >= 0");
  if (params.fd_delta <= 0.0)
    throw std::invalid_argument("queueing: fd_delta must be > 0");

  ResolvedQueueing r;
  r.staff_pool = params.staff_pool;
  r.lambda0 = params.lambda0;
  r.horizon = params.horizon;
  const double k = static_cast<double>(params.staff_pool);
  r.mu1 = params.mu1.value_or(std::log(10.0) + std::log(k));
  r.mu2 = params.mu2.value_or(std::log(2.0) + std::log(k));
  r.sigma1 = params.sigma1;
  r.sigma2 = params.sigma2;
  r.rho = params.rho;
  r.patience_shape = params.patience_shape.value_or(2.0 * r.mu1);
  if (r.patience_shape <= 0.0)
    throw std::invalid_argument("queueing: patience_shape must be > 0");
  r.patience_rate = params.patience_rate;
  r.wait_penalty = params.wait_penalty;
  r.fd_delta = params.fd_delta;
  r.wait_includes_abandoned = params.wait_includes_abandoned;
  r.count_station_one_completions = params.count_station_one_completions;
  return r;
}

double nhpp_rate(double lambda0, double horizon, double t) {
  if (t < 0.0 || t > horizon) return 0.0;
  return lambda0 * t * (horizon - t) / (horizon * horizon);
}

std::vector<double> nhpp_arrivals(double lambda0, double horizon,
                                  double acceptance_prob, RngStream& rng) {
  if (acceptance_prob < 0.0 || acceptance_prob > 1.0)
    throw std::invalid_argument("nhpp_arrivals: acceptance_prob must be in [0,1]");
  if (lambda0 < 0.0)
    throw std::invalid_argument("nhpp_arrivals: lambda0 must be >= 0");
  if (horizon <= 0.0)
    throw std::invalid_argument("nhpp_arrivals: horizon must be > 0");
  std::vector<double> times;
  if (lambda0 == 0.0) return times;
  const double envelope = lambda0 / 4.0;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(envelope);
    if (t > horizon) break;
    const double keep = nhpp_rate(lambda0, horizon, t) / envelope;
    if (rng.next_double() >= keep) continue;
    if (rng.next_double() >= acceptance_prob) continue;
    times.push_back(t);
  }
  return times;
}

SimOutput process_stations(const std::vector<Entrant>& entrants,
                           int servers_one, int servers_two, double price,
                           const ResolvedQueueing& params, SimLog* log) {
  if (servers_one < 1 || servers_two < 1)
    throw std::invalid_argument("process_stations: each station needs a server");

  SimOutput out;
  out.arrivals_entered = static_cast<int64_t>(entrants.size());

  MinHeap free_one = idle_servers(servers_one);
  std::vector<std::pair<double, double>> to_two;  // (ready time, service2)
  to_two.reserve(entrants.size());
  int64_t served_one = 0;

  for (const Entrant& e : entrants) {
    const double f = free_one.top();
    free_one.pop();
    const double start = std::max(e.arrival, f);
    const double wait = start - e.arrival;
    if (wait > e.patience) {
      ++out.abandoned;
      if (params.wait_includes_abandoned) out.total_wait += e.patience;
      free_one.push(f);
      if (log) log->abandon_times.push_back(e.arrival + e.patience);
      continue;
    }
    out.total_wait += wait;
    const double done = start + e.service1;
    free_one.push(done);
    to_two.emplace_back(done, e.service2);
    ++served_one;
    if (log) log->services.push_back({1, e.arrival, start, done});
  }

  std::stable_sort(to_two.begin(), to_two.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  MinHeap free_two = idle_servers(servers_two);
  int64_t completed_two = 0;
  for (const auto& [ready, service] : to_two) {
    const double f = free_two.top();
    free_two.pop();
    const double start = std::max(ready, f);
    out.total_wait += start - ready;
    const double done = start + service;
    free_two.push(done);
    ++completed_two;
    if (log) log->services.push_back({2, ready, start, done});
  }

  out.completed =
      params.count_station_one_completions ? served_one : completed_two;
  out.reward = price * static_cast<double>(out.completed) -
               params.wait_penalty * out.total_wait;
  return out;
}

SimOutput simulate_queueing(const ResolvedQueueing& params,
                            int servers_station_one, double price,
                            uint64_t seed, SimLog* log) {
  if (servers_station_one < 1 || servers_station_one > params.staff_pool)
    throw std::invalid_argument("simulate_queueing: x must be in [1, K]");
  if (price < 0.0 || price > 1.0)
    throw std::invalid_argument("simulate_queueing: price must be in [0,1]");

  RngStream rng(seed);
  std::vector<Entrant> entrants;
  if (params.lambda0 > 0.0) {
    const double envelope = params.lambda0 / 4.0;
    const double h = params.horizon;
    const double cross = std::sqrt(1.0 - params.rho * params.rho);
    double t = 0.0;
    for (;;) {
      t += rng.exponential(envelope);
      if (t > h) break;
      if (rng.next_double() >= nhpp_rate(params.lambda0, h, t) / envelope)
        continue;
      // Marks are drawn for every rate-accepted candidate, before the price
      // filter, so two prices replayed on one seed share customer draws.
      const double u_price = rng.next_double();
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double patience = rng.gamma(params.patience_shape, params.patience_rate);
      if (u_price >= 1.0 - price) continue;
      const double y1 = params.mu1 + params.sigma1 * z1;
      const double y2 = params.mu2 + params.sigma2 * (params.rho * z1 + cross * z2);
      entrants.push_back({t, std::exp(y1), std::exp(y2), patience});
    }
  }
  return process_stations(entrants, servers_station_one,
                          params.staff_pool + 1 - servers_station_one, price,
                          params, log);
}

std::pair<double, double> queueing_sample(const ResolvedQueueing& params,
                                          int servers_station_one, double price,
                                          uint64_t seed) {
  double hi = price;
  double lo = price - params.fd_delta;
  if (lo < 0.0) {
    lo = 0.0;
    if (hi <= 0.0) hi = std::min(params.fd_delta, 1.0);
  }
  const double value_hi =
      simulate_queueing(params, servers_station_one, hi, seed).reward;
  const double value_lo =
      simulate_queueing(params, servers_station_one, lo, seed).reward;
  const double value_at_p = price <= 0.0 ? value_lo : value_hi;
  return {value_at_p, (value_hi - value_lo) / (hi - lo)};
}

ProblemList make_queueing_problems(const QueueingParams& params) {
  const ResolvedQueueing resolved = resolve_queueing(params);
  ProblemList problems;
  problems.reserve(resolved.staff_pool);
  for (int x = 1; x <= resolved.staff_pool; ++x)
    problems.push_back(std::make_unique<QueueingProblem>(resolved, x));
  return problems;
}

}  // namespace sbos
