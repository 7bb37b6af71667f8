#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "sbos/inner.hpp"
#include "sbos/rng.hpp"

namespace sbos {

// 1-based system label.
struct SystemId {
  int index = 1;
  friend auto operator<=>(const SystemId&, const SystemId&) = default;
};

using EstimateMap = std::map<SystemId, double>;

// Snapshot of one elimination phase.
struct EliminationState {
  int phase = 0;                    // 1-based
  std::vector<SystemId> active;     // A_l, in id order
  int64_t phase_budget = 0;         // T_l samples per active system
  EstimateMap estimates;            // fresh v-hat for each active system
  int64_t evaluations_used = 0;     // cumulative raw evaluations so far
};

struct PhaseTraceEntry {
  EliminationState state;
  std::vector<SystemId> eliminated;
};

struct SelectionOutcome {
  SystemId chosen{1};
  // Exactly floor(log2 K) entries for an SEO run with K >= 2; a single
  // entry for uniform allocation; empty for OCBA and the K=1 degenerate.
  std::vector<PhaseTraceEntry> phase_trace;
  int64_t samples_used = 0;       // SGD steps, data points, or OCBA reps
  int64_t evaluations_used = 0;   // raw function evaluations / data points
  int64_t budget_leftover = 0;    // unspent raw budget lost to floors
  double wall_time_s = 0.0;
  // (system, grid index) per post-initialization OCBA allocation, when
  // OcbaConfig::record_allocation is set.
  std::vector<std::pair<int, int>> ocba_allocation;
};

struct SeoConfig {
  // Raw evaluation budget T. The elimination schedule runs on
  // T / evals_per_sample samples, so finite-difference problems
  // (evals_per_sample = 2) effectively receive T/2 gradient steps.
  int64_t total_budget = 0;
  double step_coefficient = 1.0;  // gamma0
  // Per-system start x_{1,i}; systems absent from the map fall back to
  // initial_point (clamped into the problem's box).
  std::map<SystemId, double> initial_points;
  double initial_point = 0.0;
  int evals_per_sample = 1;  // 2 when a FD gradient spends two calls
  bool warm_start = true;    // carry the iterate across phases
};

struct OcbaConfig {
  std::vector<double> grid;       // strictly increasing, at least 2 points
  double initial_fraction = 0.2;  // alpha0
  int64_t total_budget = 0;       // T raw evaluations
  bool record_allocation = false;
};

using ProblemList = std::vector<std::unique_ptr<InnerProblem>>;

// floor(T / (L * active_count)); Alg. 1's per-phase per-system budget.
int64_t phase_budget(int64_t total, int levels, int active_count);

// Keeps the floor(|active|/2) systems with the largest estimates, ties to
// the lower id; the result preserves id order.
std::vector<SystemId> halve(const std::vector<SystemId>& active,
                            const EstimateMap& estimates);

// The full (active_count, per-system budget) schedule SEO follows for a
// K-system run with `total` samples.
struct PhaseQuota {
  int active_count = 0;
  int64_t per_system = 0;
};
std::vector<PhaseQuota> phase_schedule(int64_t total_samples, int system_count);

// Sequential elimination with projected SGD inside each surviving system.
SelectionOutcome run_seo_sgd(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng);

// Sequential elimination with per-phase data collection and exact SAA
// re-solves on each system's cumulative store.
SelectionOutcome run_seo_saa(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng);

// floor(T/K) samples per system with the same inner engine as SEO, then a
// single argmax.
SelectionOutcome run_uniform(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng);

// Allocation weight for a non-incumbent cell: S^2 / (Xbar_b - Xbar)^2.
// Near-zero variances and mean gaps are clamped to 1e-12, which inflates the
// weight so ambiguous cells keep getting sampled.
double ocba_beta(double cell_variance, double incumbent_mean, double cell_mean);

// OCBA over the (system, grid point) cells with N_0 linear in T.
SelectionOutcome run_ocba(const ProblemList& problems, const OcbaConfig& config,
                          RngStream& rng);

}  // namespace sbos
