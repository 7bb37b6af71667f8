#include "sbos/problems/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbos {

namespace {

class NewsvendorProblem final : public InnerProblem {
 public:
  NewsvendorProblem(double price, double cost, double rate)
      : price_(price), cost_(cost), rate_(rate) {}

  FeasibleBox feasible() const override { return {0.0, 2.0 * rate_ + 10.0}; }
  InnerMode mode() const override { return InnerMode::kDataDriven; }

  double draw(RngStream& rng) const override {
    return static_cast<double>(rng.poisson(rate_));
  }

  ValueEstimate saa_value(const SampleStore& store) const override {
    ValueEstimate est;
    est.v_hat = newsvendor_saa_value(price_, cost_, store.draws());
    est.sample_count = store.count();
    return est;
  }

  std::optional<double> true_value() const override {
    return newsvendor_true_value(price_, cost_, rate_);
  }

 private:
  double price_;
  double cost_;
  double rate_;
};

}  // namespace

NewsvendorParams resolve_newsvendor(const NewsvendorParams& params) {
  NewsvendorParams out = params;
  const int k = out.system_count;
  if (k < 1) throw std::invalid_argument("newsvendor: need at least one system");
  if (out.prices.empty()) {
    out.prices.resize(k);
    for (int i = 1; i <= k; ++i) out.prices[i - 1] = 0.5 * i + 5.0;
  }
  if (out.costs.empty()) {
    out.costs.resize(k);
    for (int i = 1; i <= k; ++i) out.costs[i - 1] = 0.2 * i + 1.0;
  }
  if (out.rates.empty()) {
    out.rates.resize(k);
    for (int i = 1; i <= k; ++i) out.rates[i - 1] = 250.0 - 6.0 * i;
  }
  if (out.prices.size() != static_cast<size_t>(k) ||
      out.costs.size() != static_cast<size_t>(k) ||
      out.rates.size() != static_cast<size_t>(k))
    throw std::invalid_argument("newsvendor: parameter vectors must have K entries");
  for (int i = 0; i < k; ++i) {
    if (!(out.prices[i] > out.costs[i] && out.costs[i] > 0.0))
      throw std::invalid_argument("newsvendor: need p > c > 0");
    if (!(out.rates[i] > 0.0))
      throw std::invalid_argument("newsvendor: need lambda > 0");
  }
  return out;
}

ProblemList make_newsvendor_problems(const NewsvendorParams& params) {
  const NewsvendorParams resolved = resolve_newsvendor(params);
  ProblemList problems;
  problems.reserve(resolved.system_count);
  for (int i = 0; i < resolved.system_count; ++i)
    problems.push_back(std::make_unique<NewsvendorProblem>(
        resolved.prices[i], resolved.costs[i], resolved.rates[i]));
  return problems;
}

double poisson_cdf(long k, double rate) {
  if (rate < 0.0) throw std::invalid_argument("poisson_cdf: rate must be >= 0");
  if (k < 0) return 0.0;
  double pmf = std::exp(-rate);
  double cdf = pmf;
  for (long j = 1; j <= k; ++j) {
    pmf *= rate / static_cast<double>(j);
    cdf += pmf;
  }
  return std::min(cdf, 1.0);
}

long newsvendor_optimal_quantity(double price, double cost, double rate) {
  if (!(price > cost)) throw std::invalid_argument("newsvendor: need p > c");
  const double ratio = (price - cost) / price;
  double pmf = std::exp(-rate);
  double cdf = pmf;
  long q = 0;
  while (cdf < ratio) {
    ++q;
    pmf *= rate / static_cast<double>(q);
    cdf += pmf;
  }
  return q;
}

double newsvendor_true_value(double price, double cost, double rate) {
  const long q = newsvendor_optimal_quantity(price, cost, rate);
  // E[min(q,X)] = sum_{k<q} k pmf(k) + q P(X >= q).
  double pmf = std::exp(-rate);
  double cdf_below = 0.0;  // P(X <= q-1)
  double partial = 0.0;    // sum_{k<q} k pmf(k)
  for (long k = 0; k < q; ++k) {
    if (k > 0) pmf *= rate / static_cast<double>(k);
    partial += static_cast<double>(k) * pmf;
    cdf_below += pmf;
  }
  const double expected_min =
      partial + static_cast<double>(q) * (1.0 - cdf_below);
  return price * expected_min - cost * static_cast<double>(q);
}

double newsvendor_saa_quantity(double price, double cost,
                               const std::vector<double>& samples) {
  if (samples.empty())
    throw std::invalid_argument("newsvendor SAA: empty sample set");
  if (!(price > cost)) throw std::invalid_argument("newsvendor: need p > c");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Smallest k with k/n >= (p-c)/p, compared as k p >= n (p-c).
  for (size_t k = 1; k <= sorted.size(); ++k) {
    if (static_cast<double>(k) * price >= n * (price - cost))
      return sorted[k - 1];
  }
  return sorted.back();
}

double newsvendor_saa_value(double price, double cost,
                            const std::vector<double>& samples) {
  const double q = newsvendor_saa_quantity(price, cost, samples);
  double acc = 0.0;
  for (double x : samples) acc += std::min(q, x);
  return price * acc / static_cast<double>(samples.size()) - cost * q;
}

}  // namespace sbos
