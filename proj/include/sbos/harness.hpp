#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbos/problems/dosage.hpp"
#include "sbos/problems/newsvendor.hpp"
#include "sbos/problems/queueing.hpp"
#include "sbos/problems/synthetic.hpp"
#include "sbos/rng.hpp"
#include "sbos/selection.hpp"

namespace sbos {

enum class Policy { kSeoSgd, kSeoSaa, kUniformSgd, kUniformSaa, kOcba };

std::string policy_name(Policy policy);
std::optional<Policy> parse_policy(std::string_view name);

using FamilyParams = std::variant<SyntheticParams, GridTrapParams, DosageParams,
                                  NewsvendorParams, QueueingParams>;

struct InstanceSpec {
  FamilyParams params;

  bool operator==(const InstanceSpec&) const = default;
};

std::string family_name(const InstanceSpec& spec);

// Instantiated problem set plus the family's algorithm defaults.
struct BuiltInstance {
  ProblemList problems;
  std::string family;
  int system_count = 0;
  bool data_driven = false;
  int evals_per_sample = 1;
  double default_gamma0 = 1.0;
  double default_initial = 0.0;
  std::vector<double> default_grid;
};

// Builds problems from the spec; families with random structure (dosage
// perturbations) draw it from instance_rng, so one stream freezes one
// instance.
BuiltInstance make_instance(const InstanceSpec& spec, RngStream& instance_rng);

struct InstanceDiagnostics {
  std::vector<double> values;  // v_i per system
  std::vector<double> gaps;    // v_best - v_i
  double h2 = 0.0;             // max over value-ranked i>1 of i/gap_i^2
  SystemId best{1};
};

// True-value diagnostics; nullopt when the family lacks an oracle
// (queueing). Throws when the top two values are separated by less than
// min_gap, since correct-selection scoring needs a unique best.
std::optional<InstanceDiagnostics> diagnostics(const ProblemList& problems,
                                               double min_gap);

struct ExperimentPlan {
  std::string name = "experiment";
  Policy policy = Policy::kSeoSgd;
  InstanceSpec instance;
  std::vector<int64_t> budgets;  // strictly increasing raw-evaluation budgets
  int replications = 1000;
  uint64_t base_seed = 1;
  std::optional<double> gamma0;         // override the family default
  std::optional<double> initial_point;  // override the family default
  bool warm_start = true;
  double ocba_alpha0 = 0.2;
  std::vector<double> ocba_grid;  // empty = family default
  int threads = 0;                // 0 = hardware concurrency
  double min_gap = 1e-6;
  // When set, each replication draws a fresh instance (fresh dosage
  // perturbations) instead of sharing the plan-frozen one.
  bool regenerate_instance_per_rep = false;
  int pilot_budget_factor = 100;  // queueing reference-best pilot

  bool operator==(const ExperimentPlan&) const = default;
};

void validate_plan(const ExperimentPlan& plan);

struct PfsEstimate {
  int64_t budget = 0;
  double pcs = 0.0;
  double stderr_ = 0.0;  // sqrt(pcs (1-pcs) / R)
  int replications = 0;
  double mean_evaluations = 0.0;
  double wall_time_s = 0.0;
};

struct ExperimentResult {
  std::vector<PfsEstimate> points;
  SystemId true_best{1};
  std::string best_source;  // "oracle" or "pilot"
  int system_count = 0;
};

// Binomial PCS point from per-replication outcomes.
PfsEstimate summarize_pcs(const std::vector<char>& correct,
                          const std::vector<int64_t>& evaluations,
                          int64_t budget);

// One selection run of the plan's policy at the given raw budget.
SelectionOutcome run_policy(const BuiltInstance& built, const ExperimentPlan& plan,
                            int64_t budget, RngStream& rng);

// Replicated PCS estimation over the budget grid. Replications run on
// derived per-(replication, policy, budget) streams, so results do not
// depend on scheduling.
ExperimentResult run_experiment(const ExperimentPlan& plan);

// Reference best system for oracle-less families: three independent
// uniform-allocation pilots at pilot_budget_factor times the largest
// budget, which must agree.
SystemId pilot_best(const BuiltInstance& built, const ExperimentPlan& plan);

// Deterministic work distribution used by run_experiment; exposed for
// tests. threads <= 0 picks hardware concurrency.
void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t)>& body);

}  // namespace sbos
