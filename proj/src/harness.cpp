#include "sbos/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace sbos {

std::string policy_name(Policy policy) {
  switch (policy) {
    case Policy::kSeoSgd: return "seo-sgd";
    case Policy::kSeoSaa: return "seo-saa";
    case Policy::kUniformSgd: return "uniform-sgd";
    case Policy::kUniformSaa: return "uniform-saa";
    case Policy::kOcba: return "ocba";
  }
  throw std::logic_error("unknown policy");
}

std::optional<Policy> parse_policy(std::string_view name) {
  if (name == "seo-sgd") return Policy::kSeoSgd;
  if (name == "seo-saa") return Policy::kSeoSaa;
  if (name == "uniform-sgd") return Policy::kUniformSgd;
  if (name == "uniform-saa") return Policy::kUniformSaa;
  if (name == "ocba") return Policy::kOcba;
  return std::nullopt;
}

std::string family_name(const InstanceSpec& spec) {
  struct Namer {
    std::string operator()(const SyntheticParams&) const { return "synthetic"; }
    std::string operator()(const GridTrapParams&) const { return "grid-trap"; }
    std::string operator()(const DosageParams&) const { return "dosage"; }
    std::string operator()(const NewsvendorParams&) const { return "newsvendor"; }
    std::string operator()(const QueueingParams&) const { return "queueing"; }
  };
  return std::visit(Namer{}, spec.params);
}

namespace {

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

struct Builder {
  RngStream& rng;

  BuiltInstance operator()(const SyntheticParams& p) const {
    BuiltInstance b;
    b.problems = synthetic_gaussian_family(p);
    b.family = "synthetic";
    b.default_gamma0 = 0.5;
    b.default_initial = 0.5 * (p.box.lower + p.box.upper);
    b.default_grid = linear_grid(p.box.lower, p.box.upper, 10);
    return b;
  }
  BuiltInstance operator()(const GridTrapParams& p) const {
    BuiltInstance b;
    b.problems = grid_trap_family(p);
    b.family = "grid-trap";
    b.default_gamma0 = 0.3;
    b.default_initial =
        p.grid.front() + 0.25 * (p.grid.back() - p.grid.front());
    b.default_grid = p.grid;
    return b;
  }
  BuiltInstance operator()(const DosageParams& p) const {
    BuiltInstance b;
    const std::vector<double> u =
        draw_dosage_perturbations(p.system_count, p.perturbation_range, rng);
    b.problems = make_dosage_problems(p, u);
    b.family = "dosage";
    b.default_gamma0 = 1.0;
    b.default_initial = 25.0;
    b.default_grid = linear_grid(11.0, 40.0, 30);
    return b;
  }
  BuiltInstance operator()(const NewsvendorParams& p) const {
    BuiltInstance b;
    b.problems = make_newsvendor_problems(p);
    b.family = "newsvendor";
    b.data_driven = true;
    return b;
  }
  BuiltInstance operator()(const QueueingParams& p) const {
    BuiltInstance b;
    b.problems = make_queueing_problems(p);
    b.family = "queueing";
    const ResolvedQueueing r = resolve_queueing(p);
    b.default_gamma0 = 2.0 / r.horizon;
    b.default_initial = 0.5;
    b.default_grid = linear_grid(0.1, 1.0, 10);
    return b;
  }
};

}  // namespace

BuiltInstance make_instance(const InstanceSpec& spec, RngStream& instance_rng) {
  BuiltInstance built = std::visit(Builder{instance_rng}, spec.params);
  built.system_count = static_cast<int>(built.problems.size());
  if (!built.data_driven && built.system_count > 0)
    built.evals_per_sample = built.problems.front()->evals_per_sample();
  return built;
}

std::optional<InstanceDiagnostics> diagnostics(const ProblemList& problems,
                                               double min_gap) {
  if (problems.empty()) throw std::invalid_argument("diagnostics: no systems");
  InstanceDiagnostics diag;
  diag.values.reserve(problems.size());
  for (const auto& p : problems) {
    const std::optional<double> v = p->true_value();
    if (!v) return std::nullopt;
    diag.values.push_back(*v);
  }
  std::vector<int> order(diag.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return diag.values[a] > diag.values[b];
  });
  const double best_value = diag.values[order.front()];
  diag.best = SystemId{order.front() + 1};
  diag.gaps.resize(diag.values.size());
  for (size_t i = 0; i < diag.values.size(); ++i)
    diag.gaps[i] = best_value - diag.values[i];
  if (diag.values.size() >= 2) {
    const double top_gap = best_value - diag.values[order[1]];
    if (top_gap < min_gap)
      throw std::invalid_argument(
          "diagnostics: no unique best system (top-two gap below threshold)");
    diag.h2 = 0.0;
    for (size_t rank = 1; rank < order.size(); ++rank) {
      const double gap = best_value - diag.values[order[rank]];
      diag.h2 = std::max(
          diag.h2, static_cast<double>(rank + 1) / (gap * gap));
    }
  }
  return diag;
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.replications < 1)
    throw std::invalid_argument("plan: replications must be >= 1");
  if (plan.budgets.empty()) throw std::invalid_argument("plan: empty budget grid");
  for (size_t i = 1; i < plan.budgets.size(); ++i) {
    if (plan.budgets[i] <= plan.budgets[i - 1])
      throw std::invalid_argument("plan: budgets must be strictly increasing");
  }
  const bool data_driven =
      std::holds_alternative<NewsvendorParams>(plan.instance.params);
  const bool wants_data = plan.policy == Policy::kSeoSaa ||
                          plan.policy == Policy::kUniformSaa;
  if (data_driven && !wants_data)
    throw std::invalid_argument(policy_name(plan.policy) +
                                " is not applicable to the data-driven family " +
                                family_name(plan.instance));
  if (!data_driven && wants_data)
    throw std::invalid_argument(policy_name(plan.policy) +
                                " needs a data-driven family, got " +
                                family_name(plan.instance));
  if (plan.regenerate_instance_per_rep &&
      std::holds_alternative<QueueingParams>(plan.instance.params))
    throw std::invalid_argument(
        "plan: per-replication instances need a true-value oracle");
}

SelectionOutcome run_policy(const BuiltInstance& built, const ExperimentPlan& plan,
                            int64_t budget, RngStream& rng) {
  switch (plan.policy) {
    case Policy::kSeoSgd:
    case Policy::kUniformSgd:
    case Policy::kSeoSaa:
    case Policy::kUniformSaa: {
      SeoConfig config;
      config.total_budget = budget;
      config.step_coefficient = plan.gamma0.value_or(built.default_gamma0);
      config.initial_point = plan.initial_point.value_or(built.default_initial);
      config.evals_per_sample = built.data_driven ? 1 : built.evals_per_sample;
      config.warm_start = plan.warm_start;
      switch (plan.policy) {
        case Policy::kSeoSgd: return run_seo_sgd(built.problems, config, rng);
        case Policy::kSeoSaa: return run_seo_saa(built.problems, config, rng);
        default: return run_uniform(built.problems, config, rng);
      }
    }
    case Policy::kOcba: {
      OcbaConfig config;
      config.grid = plan.ocba_grid.empty() ? built.default_grid : plan.ocba_grid;
      config.initial_fraction = plan.ocba_alpha0;
      config.total_budget = budget;
      return run_ocba(built.problems, config, rng);
    }
  }
  throw std::logic_error("unknown policy");
}

void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t)>& body) {
  if (count <= 0) return;
  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(
      std::min<int64_t>(workers, count));
  if (workers == 1) {
    for (int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SystemId pilot_best(const BuiltInstance& built, const ExperimentPlan& plan) {
  if (plan.budgets.empty()) throw std::invalid_argument("pilot: empty budgets");
  const int64_t pilot_budget = plan.budgets.back() * plan.pilot_budget_factor;
  SeoConfig config;
  config.total_budget = pilot_budget;
  config.step_coefficient = plan.gamma0.value_or(built.default_gamma0);
  config.initial_point = plan.initial_point.value_or(built.default_initial);
  config.evals_per_sample = built.data_driven ? 1 : built.evals_per_sample;
  std::optional<SystemId> agreed;
  for (uint64_t p = 0; p < 3; ++p) {
    RngStream rng = derive_stream(plan.base_seed, p, "pilot");
    const SelectionOutcome outcome = run_uniform(built.problems, config, rng);
    if (agreed && !(*agreed == outcome.chosen))
      throw std::runtime_error(
          "pilot runs disagree on the best system; raise pilot_budget_factor");
    agreed = outcome.chosen;
  }
  return *agreed;
}

PfsEstimate summarize_pcs(const std::vector<char>& correct,
                          const std::vector<int64_t>& evaluations,
                          int64_t budget) {
  if (correct.empty() || correct.size() != evaluations.size())
    throw std::invalid_argument("summarize_pcs: mismatched outcome vectors");
  PfsEstimate point;
  point.budget = budget;
  point.replications = static_cast<int>(correct.size());
  const double r = static_cast<double>(correct.size());
  point.pcs =
      static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0L)) / r;
  point.stderr_ = std::sqrt(point.pcs * (1.0 - point.pcs) / r);
  point.mean_evaluations = static_cast<double>(std::accumulate(
                               evaluations.begin(), evaluations.end(), 0LL)) /
                           r;
  return point;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  validate_plan(plan);
  RngStream instance_rng = derive_stream(plan.base_seed, 0, "instance");
  const BuiltInstance built = make_instance(plan.instance, instance_rng);

  ExperimentResult result;
  result.system_count = built.system_count;
  std::optional<InstanceDiagnostics> diag;
  if (!plan.regenerate_instance_per_rep) {
    diag = diagnostics(built.problems, plan.min_gap);
    if (diag) {
      result.true_best = diag->best;
      result.best_source = "oracle";
    } else {
      result.true_best = pilot_best(built, plan);
      result.best_source = "pilot";
    }
  } else {
    result.best_source = "oracle-per-replication";
  }

  const std::string policy = policy_name(plan.policy);
  for (const int64_t budget : plan.budgets) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<char> correct(plan.replications, 0);
    std::vector<int64_t> evals(plan.replications, 0);
    const std::string role = policy + "/T=" + std::to_string(budget);
    parallel_for(plan.replications, plan.threads, [&](int64_t rep) {
      const BuiltInstance* instance = &built;
      BuiltInstance local;
      SystemId best = result.true_best;
      if (plan.regenerate_instance_per_rep) {
        RngStream rep_instance_rng =
            derive_stream(plan.base_seed, static_cast<uint64_t>(rep), "instance");
        local = make_instance(plan.instance, rep_instance_rng);
        const auto local_diag = diagnostics(local.problems, plan.min_gap);
        if (!local_diag)
          throw std::invalid_argument(
              "per-replication instances need a true-value oracle");
        best = local_diag->best;
        instance = &local;
      }
      RngStream rng =
          derive_stream(plan.base_seed, static_cast<uint64_t>(rep), role);
      const SelectionOutcome outcome = run_policy(*instance, plan, budget, rng);
      correct[rep] = outcome.chosen == best ? 1 : 0;
      evals[rep] = outcome.evaluations_used;
    });
    PfsEstimate point = summarize_pcs(correct, evals, budget);
    point.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.points.push_back(point);
  }
  return result;
}

}  // namespace sbos
