// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Thresholds marked "pilot" were frozen from calibration runs of this same
// code; they are not tuned at test time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sbos/csv.hpp"
#include "sbos/harness.hpp"
#include "sbos/problems/queueing.hpp"
#include "sbos/selection.hpp"

using namespace sbos;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

void report(int index, const char* name, bool ok, double seconds,
            double limit_seconds) {
  const bool in_time = seconds < limit_seconds;
  if (!ok || !in_time) ++g_failures;
  std::printf("%s criterion-%d %s (%.2fs, limit %.0fs)\n",
              ok && in_time ? "PASS" : "FAIL", index, name, seconds,
              limit_seconds);
  for (const std::string& line : g_notes) std::printf("       %s\n", line.c_str());
  g_notes.clear();
}

double run_timed(const std::function<bool()>& body, bool& ok) {
  const auto start = std::chrono::steady_clock::now();
  ok = body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

class FixedValueProblem final : public InnerProblem {
 public:
  explicit FixedValueProblem(double value) : value_(value) {}
  FeasibleBox feasible() const override { return {0.0, 1.0}; }
  InnerMode mode() const override { return InnerMode::kGradient; }
  double evaluate(double, RngStream&) const override { return value_; }
  GradientSample sample(double, RngStream& rng) const override {
    return {evaluate(0.0, rng), 0.0, 1};
  }

 private:
  double value_;
};

// Noisy concave quadratic used for the estimator-rate study.
class RateProblem final : public InnerProblem {
 public:
  FeasibleBox feasible() const override { return {-2.0, 2.0}; }
  InnerMode mode() const override { return InnerMode::kGradient; }
  double evaluate(double x, RngStream& rng) const override {
    return -x * x + rng.normal();
  }
  GradientSample sample(double x, RngStream& rng) const override {
    GradientSample s;
    s.value = evaluate(x, rng);
    s.gradient = -2.0 * x + rng.normal();
    return s;
  }

 private:
};

// --- criterion 1 -----------------------------------------------------------

bool budget_halving_suite() {
  RngStream rng(1);
  for (int k = 2; k <= 256; ++k) {
    const int levels = static_cast<int>(std::floor(std::log2(k)));
    const int64_t floor_budget = static_cast<int64_t>(levels) * k;

    // Schedule arithmetic across a wide budget range.
    for (int trial = 0; trial < 100; ++trial) {
      const int64_t budget =
          floor_budget +
          static_cast<int64_t>(rng.next_double() * (1000000 - floor_budget));
      const auto schedule = phase_schedule(budget, k);
      if (static_cast<int>(schedule.size()) != levels) return false;
      int active = k;
      int64_t spent = 0;
      for (const PhaseQuota& q : schedule) {
        if (q.active_count != active) return false;
        if (q.per_system != budget / (static_cast<int64_t>(levels) * active))
          return false;
        spent += static_cast<int64_t>(q.active_count) * q.per_system;
        active /= 2;
      }
      if (active != 1) return false;
      if (spent > budget) return false;
    }

    // Live runs must follow the same schedule exactly.
    ProblemList problems;
    for (int i = 0; i < k; ++i)
      problems.push_back(std::make_unique<FixedValueProblem>(
          static_cast<double>((i * 7919) % k)));
    for (int trial = 0; trial < 3; ++trial) {
      const int64_t budget =
          floor_budget + static_cast<int64_t>(rng.next_double() * 2.0 *
                                              static_cast<double>(floor_budget));
      SeoConfig config;
      config.total_budget = budget;
      const auto schedule = phase_schedule(budget, k);
      const SelectionOutcome out = run_seo_sgd(problems, config, rng);
      if (static_cast<int>(out.phase_trace.size()) != levels) return false;
      int64_t samples = 0;
      for (int l = 0; l < levels; ++l) {
        const EliminationState& state = out.phase_trace[l].state;
        if (state.phase_budget != schedule[l].per_system) return false;
        if (static_cast<int>(state.active.size()) != schedule[l].active_count)
          return false;
        samples +=
            schedule[l].per_system * static_cast<int64_t>(state.active.size());
      }
      if (out.samples_used != samples) return false;
      if (out.evaluations_used > budget) return false;
    }
  }
  return true;
}

// --- criterion 2 -----------------------------------------------------------

bool estimator_rate() {
  const RateProblem problem;
  const std::vector<double> horizons{100.0, 1000.0, 10000.0};
  std::vector<double> log_t, log_err;
  for (const double t : horizons) {
    std::vector<double> errors;
    for (int seed = 0; seed < 200; ++seed) {
      RngStream rng = derive_stream(1001, seed, "rate-study");
      const SgdPhaseResult r =
          run_sgd_phase(problem, 1.0, static_cast<int64_t>(t), 1.0, rng);
      errors.push_back(std::fabs(r.estimate.v_hat));
    }
    std::sort(errors.begin(), errors.end());
    const double median = 0.5 * (errors[99] + errors[100]);
    log_t.push_back(std::log(t));
    log_err.push_back(std::log(median));
  }
  // Least-squares slope of log median error against log T.
  const double n = 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    sx += log_t[i];
    sy += log_err[i];
    sxx += log_t[i] * log_t[i];
    sxy += log_t[i] * log_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  note("log-log slope " + std::to_string(slope));
  return slope > -0.65 && slope < -0.35;
}

// --- criterion 3 -----------------------------------------------------------

bool oracle_equivalence() {
  // Dosage vertex oracle vs. brute-force grid search.
  const DosageParams dosage;
  RngStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = rng.uniform(-0.1, 0.1);
    const double a = (1.0 + u) * dosage.a_star;
    const double b = (1.0 + u) * dosage.b_star;
    const double c = (1.0 + u) * dosage.c_star;
    double best = -1e300;
    for (double q = 0.0; q <= 50.0 + 1e-9; q += 1e-3)
      best = std::max(best, -(a * q * q + b * q + c));
    if (std::fabs(dosage_true_value(dosage, u) - best) > 1e-6) return false;
  }

  // Newsvendor Poisson oracle vs. brute force for the 16 stated systems.
  const NewsvendorParams news = resolve_newsvendor({});
  for (int i = 0; i < news.system_count; ++i) {
    const double p = news.prices[i];
    const double c = news.costs[i];
    const double rate = news.rates[i];
    const long q_max = static_cast<long>(rate + 10.0 * std::sqrt(rate)) + 1;
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
    if (newsvendor_optimal_quantity(p, c, rate) != best_q) return false;
    if (std::fabs(newsvendor_true_value(p, c, rate) - best_value) > 1e-10)
      return false;
  }

  // Closed-form SAA vs. exhaustive empirical search.
  for (int trial = 0; trial < 1000; ++trial) {
    const double p = 1.0 + 9.0 * rng.next_double();
    const double c = p * (0.05 + 0.9 * rng.next_double());
    const double rate = 1.0 + 40.0 * rng.next_double();
    const int n = 1 + static_cast<int>(rng.next_double() * 30);
    std::vector<double> samples(n);
    long max_sample = 0;
    for (double& s : samples) {
      s = static_cast<double>(rng.poisson(rate));
      max_sample = std::max(max_sample, static_cast<long>(s));
    }
    const double closed = newsvendor_saa_value(p, c, samples);
    double brute = -1e300;
    for (long q = 0; q <= max_sample; ++q) {
      double acc = 0.0;
      for (double s : samples) acc += std::min(static_cast<double>(q), s);
      brute = std::max(brute, p * acc / n - c * static_cast<double>(q));
    }
    if (std::fabs(closed - brute) > 1e-10) return false;
  }
  return true;
}

// --- criterion 4 -----------------------------------------------------------

bool queueing_statistics() {
  const ResolvedQueueing inst = resolve_queueing(QueueingParams{});

  // Price 0 admits everyone: mean entrants within 3 SE of lambda0 H / 6.
  const int runs = 10000;
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    const SimOutput out =
        simulate_queueing(inst, 8, 0.0, mix64(static_cast<uint64_t>(r)));
    sum += static_cast<double>(out.arrivals_entered);
  }
  const double target = 1000.0 / 3.0;
  const double mean = sum / runs;
  const double se = std::sqrt(target / runs);  // Poisson count variance
  note("entrant mean " + std::to_string(mean) + " target 333.33 (3SE " +
       std::to_string(3.0 * se) + ")");
  if (std::fabs(mean - target) > 3.0 * se) return false;

  // Price 1 rejects everyone, every replication.
  for (int r = 0; r < runs; ++r) {
    const SimOutput out =
        simulate_queueing(inst, 8, 1.0, mix64(static_cast<uint64_t>(r) + 77));
    if (out.arrivals_entered != 0) return false;
  }

  // Conservation audit with event logs on small horizons.
  QueueingParams small;
  small.staff_pool = 4;
  small.horizon = 150.0;
  const ResolvedQueueing small_inst = resolve_queueing(small);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    SimLog log;
    const int x = 1 + static_cast<int>(seed % 4);
    const SimOutput out = simulate_queueing(small_inst, x, 0.2, seed, &log);
    if (out.arrivals_entered != out.completed + out.abandoned) return false;
    if (out.total_wait < 0.0) return false;
    for (const int station : {1, 2}) {
      const int servers = station == 1 ? x : small_inst.staff_pool + 1 - x;
      std::vector<std::pair<double, int>> events;
      for (const ServiceEvent& e : log.services) {
        if (e.station != station) continue;
        if (e.start < e.arrival || e.end < e.start) return false;
        events.emplace_back(e.start, +1);
        events.emplace_back(e.end, -1);
      }
      std::sort(events.begin(), events.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
                });
      int busy = 0;
      for (const auto& [t, delta] : events) {
        busy += delta;
        if (busy > servers || busy < 0) return false;
      }
    }
  }
  return true;
}

// --- criterion 5 -----------------------------------------------------------

bool dosage_figure_ordering() {
  ExperimentPlan plan;
  plan.instance.params = DosageParams{};
  plan.budgets = {2000, 4000, 8000, 16000, 32000, 64000};
  plan.replications = 500;
  plan.base_seed = 5;
  plan.threads = 0;

  plan.policy = Policy::kSeoSgd;
  const ExperimentResult seo = run_experiment(plan);
  plan.policy = Policy::kUniformSgd;
  const ExperimentResult uniform = run_experiment(plan);

  int strictly_greater = 0;
  for (size_t i = 0; i < seo.points.size(); ++i) {
    const PfsEstimate& s = seo.points[i];
    const PfsEstimate& u = uniform.points[i];
    note("T=" + std::to_string(s.budget) + " seo=" + std::to_string(s.pcs) +
         " uniform=" + std::to_string(u.pcs));
    if (s.pcs < u.pcs - 2.0 * (s.stderr_ + u.stderr_)) return false;
    if (s.pcs > u.pcs) ++strictly_greater;
  }
  if (strictly_greater < 3) return false;
  // Pilot-frozen floor for the largest budget (observed 0.946 at R=500).
  return seo.points.back().pcs >= 0.90;
}

// --- criterion 6 -----------------------------------------------------------

bool grid_trap_demonstration() {
  ExperimentPlan plan;
  plan.instance.params = GridTrapParams{};
  plan.budgets = {2000};
  plan.replications = 1000;
  plan.base_seed = 31415;
  plan.threads = 0;
  plan.gamma0 = 0.3;

  plan.policy = Policy::kOcba;
  const ExperimentResult ocba = run_experiment(plan);
  plan.policy = Policy::kSeoSgd;
  const ExperimentResult seo = run_experiment(plan);
  note("ocba pcs " + std::to_string(ocba.points[0].pcs) + ", seo pcs " +
       std::to_string(seo.points[0].pcs));
  // Identical on-grid distributions cap OCBA near a coin flip; the pilot
  // put SEO at 1.0, frozen threshold 0.9.
  return ocba.points[0].pcs <= 0.55 && seo.points[0].pcs >= 0.90;
}

// --- criterion 7 -----------------------------------------------------------

bool exponential_decay_sanity() {
  ExperimentPlan plan;
  plan.instance.params = synthetic_uniform_gaps(8, 0.35, 1.0);
  plan.budgets = {320, 640, 1280};
  plan.replications = 2000;
  plan.base_seed = 2718;
  plan.threads = 0;
  plan.policy = Policy::kSeoSgd;
  const ExperimentResult result = run_experiment(plan);
  for (size_t i = 0; i + 1 < result.points.size(); ++i) {
    const PfsEstimate& a = result.points[i];
    const PfsEstimate& b = result.points[i + 1];
    const double pfs_a = 1.0 - a.pcs;
    const double pfs_b = 1.0 - b.pcs;
    note("T=" + std::to_string(a.budget) + " pfs=" + std::to_string(pfs_a));
    if (i + 2 == result.points.size())
      note("T=" + std::to_string(b.budget) + " pfs=" + std::to_string(pfs_b));
    if (pfs_b > pfs_a + 2.0 * (a.stderr_ + b.stderr_)) return false;
  }
  return true;
}

// --- criterion 8 -----------------------------------------------------------

std::string plan_to_csv(const ExperimentPlan& plan) {
  const ExperimentResult result = run_experiment(plan);
  std::vector<ResultRow> rows;
  for (const PfsEstimate& point : result.points) {
    ResultRow row;
    row.experiment = plan.name;
    row.policy = policy_name(plan.policy);
    row.family = family_name(plan.instance);
    row.system_count = result.system_count;
    row.budget = point.budget;
    row.replications = point.replications;
    row.pcs = point.pcs;
    row.stderr_ = point.stderr_;
    row.mean_evaluations = point.mean_evaluations;
    row.base_seed = plan.base_seed;
    row.wall_time_s = point.wall_time_s;
    rows.push_back(row);
  }
  return to_csv(rows);
}

std::string strip_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    out << line.substr(0, line.rfind(',')) << "\n";
  return out.str();
}

bool determinism_serial_vs_threaded() {
  std::vector<ExperimentPlan> plans;

  ExperimentPlan dosage;
  dosage.name = "det-dosage";
  dosage.policy = Policy::kSeoSgd;
  DosageParams dosage_params;
  dosage_params.system_count = 8;
  dosage.instance.params = dosage_params;
  dosage.budgets = {1024, 2048};
  dosage.replications = 64;
  dosage.base_seed = 11;
  plans.push_back(dosage);

  ExperimentPlan news;
  news.name = "det-news";
  news.policy = Policy::kSeoSaa;
  NewsvendorParams news_params;
  news_params.system_count = 8;
  news.instance.params = news_params;
  news.budgets = {640};
  news.replications = 64;
  news.base_seed = 12;
  plans.push_back(news);

  ExperimentPlan ocba;
  ocba.name = "det-ocba";
  ocba.policy = Policy::kOcba;
  ocba.instance.params = synthetic_uniform_gaps(4, 0.5, 1.0);
  ocba.budgets = {1200};
  ocba.replications = 64;
  ocba.base_seed = 13;
  plans.push_back(ocba);

  for (ExperimentPlan plan : plans) {
    plan.threads = 1;
    const std::string serial = plan_to_csv(plan);
    plan.threads = 8;
    const std::string threaded = plan_to_csv(plan);
    if (strip_wall_time(serial) != strip_wall_time(threaded)) {
      note("mismatch for " + plan.name);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<bool()> body;
  };
  const std::vector<Criterion> criteria{
      {"budget-and-halving", 1.0, budget_halving_suite},
      {"sgd-estimator-rate", 30.0, estimator_rate},
      {"oracle-equivalence", 10.0, oracle_equivalence},
      {"queueing-statistics", 120.0, queueing_statistics},
      {"dosage-policy-ordering", 600.0, dosage_figure_ordering},
      {"off-grid-peak-vs-ocba", 300.0, grid_trap_demonstration},
      {"pfs-decay-on-doubling", 300.0, exponential_decay_sanity},
      {"serial-threaded-determinism", 600.0, determinism_serial_vs_threaded},
  };
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    bool ok = false;
    double seconds = 0.0;
    try {
      seconds = run_timed(criterion.body, ok);
    } catch (const std::exception& e) {
      note(std::string("exception: ") + e.what());
      ok = false;
    }
    report(index, criterion.name, ok, seconds, criterion.limit_seconds);
  }
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
