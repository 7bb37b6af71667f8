#include "sbos/selection.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbos {

namespace {

int floor_log2(int k) {
  return std::bit_width(static_cast<unsigned>(k)) - 1;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::vector<SystemId> all_systems(int count) {
  std::vector<SystemId> ids;
  ids.reserve(count);
  for (int i = 1; i <= count; ++i) ids.push_back(SystemId{i});
  return ids;
}

double initial_for(const SeoConfig& config, SystemId id, const FeasibleBox& box) {
  auto it = config.initial_points.find(id);
  return box.clamp(it != config.initial_points.end() ? it->second
                                                     : config.initial_point);
}

void check_problems(const ProblemList& problems, InnerMode expected) {
  for (const auto& p : problems) {
    if (!p) throw std::invalid_argument("null problem");
    if (p->mode() != expected)
      throw std::invalid_argument("problem mode does not match the policy");
  }
}

void check_seo_budget(const SeoConfig& config, int k, int levels) {
  if (config.evals_per_sample != 1 && config.evals_per_sample != 2)
    throw std::invalid_argument("evals_per_sample must be 1 or 2");
  if (config.step_coefficient <= 0.0)
    throw std::invalid_argument("step_coefficient must be > 0");
  const int64_t samples = config.total_budget / config.evals_per_sample;
  if (samples < static_cast<int64_t>(levels) * k)
    throw std::invalid_argument(
        "total_budget too small: needs at least one sample per system per phase");
}

SelectionOutcome degenerate_single() {
  SelectionOutcome out;
  out.chosen = SystemId{1};
  return out;
}

SystemId argmax_estimate(const std::vector<SystemId>& ids,
                         const EstimateMap& estimates) {
  SystemId best = ids.front();
  double best_value = estimates.at(best);
  for (const SystemId id : ids) {
    const double v = estimates.at(id);
    if (v > best_value) {
      best = id;
      best_value = v;
    }
  }
  return best;
}

constexpr double kVarFloor = 1e-12;

}  // namespace

double ocba_beta(double cell_variance, double incumbent_mean, double cell_mean) {
  const double var = std::max(cell_variance, kVarFloor);
  double diff = incumbent_mean - cell_mean;
  if (std::fabs(diff) < kVarFloor) diff = kVarFloor;
  return var / (diff * diff);
}

int64_t phase_budget(int64_t total, int levels, int active_count) {
  if (total < 1) throw std::invalid_argument("phase_budget: total must be >= 1");
  if (levels < 1) throw std::invalid_argument("phase_budget: levels must be >= 1");
  if (active_count < 1)
    throw std::invalid_argument("phase_budget: active_count must be >= 1");
  return total / (static_cast<int64_t>(levels) * active_count);
}

std::vector<SystemId> halve(const std::vector<SystemId>& active,
                            const EstimateMap& estimates) {
  if (active.size() < 2)
    throw std::invalid_argument("halve: need at least two active systems");
  for (const SystemId id : active) {
    if (estimates.find(id) == estimates.end())
      throw std::logic_error("halve: missing estimate for system " +
                             std::to_string(id.index));
  }
  std::vector<SystemId> ranked = active;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](SystemId a, SystemId b) {
                     const double va = estimates.at(a);
                     const double vb = estimates.at(b);
                     if (va != vb) return va > vb;
                     return a.index < b.index;
                   });
  ranked.resize(active.size() / 2);
  std::sort(ranked.begin(), ranked.end());
  return ranked;
}

std::vector<PhaseQuota> phase_schedule(int64_t total_samples, int system_count) {
  if (system_count < 2)
    throw std::invalid_argument("phase_schedule: need at least two systems");
  const int levels = floor_log2(system_count);
  std::vector<PhaseQuota> schedule;
  schedule.reserve(levels);
  int active = system_count;
  for (int l = 0; l < levels; ++l) {
    schedule.push_back({active, phase_budget(total_samples, levels, active)});
    active /= 2;
  }
  if (active != 1)
    throw std::logic_error("phase_schedule: halving chain did not end at 1");
  return schedule;
}

SelectionOutcome run_seo_sgd(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng) {
  const int k = static_cast<int>(problems.size());
  if (k < 1) throw std::invalid_argument("run_seo_sgd: no systems");
  if (k == 1) return degenerate_single();
  check_problems(problems, InnerMode::kGradient);
  for (const auto& p : problems) {
    if (p->evals_per_sample() != config.evals_per_sample)
      throw std::invalid_argument(
          "config evals_per_sample disagrees with the problems");
  }
  const int levels = floor_log2(k);
  check_seo_budget(config, k, levels);
  const int64_t total_samples = config.total_budget / config.evals_per_sample;

  Stopwatch clock;
  SelectionOutcome out;
  std::vector<SystemId> active = all_systems(k);
  std::map<SystemId, double> iterate;
  for (const SystemId id : active)
    iterate[id] = initial_for(config, id, problems[id.index - 1]->feasible());

  for (int phase = 1; phase <= levels; ++phase) {
    const int64_t quota =
        phase_budget(total_samples, levels, static_cast<int>(active.size()));
    EliminationState state;
    state.phase = phase;
    state.active = active;
    state.phase_budget = quota;
    for (const SystemId id : active) {
      const InnerProblem& problem = *problems[id.index - 1];
      const double start = config.warm_start
                               ? iterate.at(id)
                               : initial_for(config, id, problem.feasible());
      const SgdPhaseResult r =
          run_sgd_phase(problem, start, quota, config.step_coefficient, rng);
      iterate[id] = r.final_iterate;
      state.estimates[id] = r.estimate.v_hat;
      out.samples_used += quota;
      out.evaluations_used += r.evaluations;
    }
    state.evaluations_used = out.evaluations_used;
    const std::vector<SystemId> survivors = halve(active, state.estimates);
    PhaseTraceEntry entry;
    entry.state = std::move(state);
    std::set_difference(active.begin(), active.end(), survivors.begin(),
                        survivors.end(), std::back_inserter(entry.eliminated));
    out.phase_trace.push_back(std::move(entry));
    active = survivors;
  }
  if (active.size() != 1)
    throw std::logic_error("run_seo_sgd: halving did not isolate one system");
  out.chosen = active.front();
  out.budget_leftover = config.total_budget - out.evaluations_used;
  out.wall_time_s = clock.seconds();
  return out;
}

SelectionOutcome run_seo_saa(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng) {
  const int k = static_cast<int>(problems.size());
  if (k < 1) throw std::invalid_argument("run_seo_saa: no systems");
  if (k == 1) return degenerate_single();
  check_problems(problems, InnerMode::kDataDriven);
  if (config.evals_per_sample != 1)
    throw std::invalid_argument("run_seo_saa: data draws cost one evaluation");
  const int levels = floor_log2(k);
  check_seo_budget(config, k, levels);

  Stopwatch clock;
  SelectionOutcome out;
  std::vector<SystemId> active = all_systems(k);
  std::vector<SampleStore> stores(k);

  for (int phase = 1; phase <= levels; ++phase) {
    const int64_t quota = phase_budget(config.total_budget, levels,
                                       static_cast<int>(active.size()));
    EliminationState state;
    state.phase = phase;
    state.active = active;
    state.phase_budget = quota;
    for (const SystemId id : active) {
      const InnerProblem& problem = *problems[id.index - 1];
      SampleStore& store = stores[id.index - 1];
      for (int64_t t = 0; t < quota; ++t) store.append(problem.draw(rng));
      out.samples_used += quota;
      out.evaluations_used += quota;
      state.estimates[id] = solve_saa(problem, store).v_hat;
    }
    state.evaluations_used = out.evaluations_used;
    const std::vector<SystemId> survivors = halve(active, state.estimates);
    PhaseTraceEntry entry;
    entry.state = std::move(state);
    std::set_difference(active.begin(), active.end(), survivors.begin(),
                        survivors.end(), std::back_inserter(entry.eliminated));
    out.phase_trace.push_back(std::move(entry));
    active = survivors;
  }
  if (active.size() != 1)
    throw std::logic_error("run_seo_saa: halving did not isolate one system");
  out.chosen = active.front();
  out.budget_leftover = config.total_budget - out.evaluations_used;
  out.wall_time_s = clock.seconds();
  return out;
}

SelectionOutcome run_uniform(const ProblemList& problems, const SeoConfig& config,
                             RngStream& rng) {
  const int k = static_cast<int>(problems.size());
  if (k < 1) throw std::invalid_argument("run_uniform: no systems");
  if (k == 1) return degenerate_single();
  const InnerMode mode = problems.front()->mode();
  check_problems(problems, mode);
  if (config.evals_per_sample != 1 && config.evals_per_sample != 2)
    throw std::invalid_argument("evals_per_sample must be 1 or 2");
  if (mode == InnerMode::kDataDriven && config.evals_per_sample != 1)
    throw std::invalid_argument("run_uniform: data draws cost one evaluation");
  const int64_t total_samples = config.total_budget / config.evals_per_sample;
  const int64_t quota = total_samples / k;
  if (quota < 1)
    throw std::invalid_argument("run_uniform: budget below one sample per system");

  Stopwatch clock;
  SelectionOutcome out;
  EliminationState state;
  state.phase = 1;
  state.active = all_systems(k);
  state.phase_budget = quota;
  for (const SystemId id : state.active) {
    const InnerProblem& problem = *problems[id.index - 1];
    if (mode == InnerMode::kGradient) {
      const double start = initial_for(config, id, problem.feasible());
      const SgdPhaseResult r =
          run_sgd_phase(problem, start, quota, config.step_coefficient, rng);
      state.estimates[id] = r.estimate.v_hat;
      out.evaluations_used += r.evaluations;
    } else {
      SampleStore store;
      for (int64_t t = 0; t < quota; ++t) store.append(problem.draw(rng));
      state.estimates[id] = solve_saa(problem, store).v_hat;
      out.evaluations_used += quota;
    }
    out.samples_used += quota;
  }
  state.evaluations_used = out.evaluations_used;
  out.chosen = argmax_estimate(state.active, state.estimates);
  out.phase_trace.push_back({std::move(state), {}});
  out.budget_leftover = config.total_budget - out.evaluations_used;
  out.wall_time_s = clock.seconds();
  return out;
}

SelectionOutcome run_ocba(const ProblemList& problems, const OcbaConfig& config,
                          RngStream& rng) {
  const int k = static_cast<int>(problems.size());
  if (k < 1) throw std::invalid_argument("run_ocba: no systems");
  if (k == 1) return degenerate_single();
  check_problems(problems, InnerMode::kGradient);
  const int d = static_cast<int>(config.grid.size());
  if (d < 2) throw std::invalid_argument("run_ocba: grid needs at least 2 points");
  for (int j = 1; j < d; ++j) {
    if (!(config.grid[j] > config.grid[j - 1]))
      throw std::invalid_argument("run_ocba: grid must be strictly increasing");
  }
  if (config.initial_fraction <= 0.0 || config.initial_fraction >= 1.0)
    throw std::invalid_argument("run_ocba: initial_fraction must be in (0,1)");
  for (const auto& p : problems) {
    const FeasibleBox box = p->feasible();
    if (config.grid.front() < box.lower || config.grid.back() > box.upper)
      throw std::invalid_argument("run_ocba: grid leaves the feasible box");
  }
  const int64_t total = config.total_budget;
  const int64_t cells = static_cast<int64_t>(k) * d;
  if (total < 2 * cells)
    throw std::invalid_argument(
        "run_ocba: budget below two initial replications per cell");

  const int64_t n0 = std::max<int64_t>(
      2, static_cast<int64_t>(config.initial_fraction * static_cast<double>(total) /
                              static_cast<double>(cells)));

  Stopwatch clock;
  std::vector<double> mean(cells, 0.0);
  std::vector<double> m2(cells, 0.0);
  std::vector<int64_t> count(cells, 0);
  const auto cell = [d](int i, int j) { return static_cast<size_t>(i) * d + j; };
  const auto observe = [&](int i, int j, double value) {
    const size_t c = cell(i, j);
    ++count[c];
    const double delta = value - mean[c];
    mean[c] += delta / static_cast<double>(count[c]);
    m2[c] += delta * (value - mean[c]);
  };
  const auto variance = [&](size_t c) {
    return count[c] > 1 ? m2[c] / static_cast<double>(count[c] - 1) : 0.0;
  };

  int64_t used = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int64_t r = 0; r < n0; ++r)
        observe(i, j, problems[i]->evaluate(config.grid[j], rng));
    }
  }
  used = n0 * cells;

  SelectionOutcome out;
  std::vector<double> beta(cells, 0.0);
  while (used < total) {
    // Incumbent cell: largest mean, ties to the lexicographically lower cell.
    size_t best = 0;
    for (size_t c = 1; c < static_cast<size_t>(cells); ++c)
      if (mean[c] > mean[best]) best = c;

    double s = 0.0;
    for (size_t c = 0; c < static_cast<size_t>(cells); ++c) {
      if (c == best) continue;
      const double var = std::max(variance(c), kVarFloor);
      beta[c] = ocba_beta(variance(c), mean[best], mean[c]);
      s += beta[c] * beta[c] / var;
    }
    beta[best] = std::sqrt(std::max(variance(best), kVarFloor)) * std::sqrt(s);

    size_t next = 0;
    double next_score = beta[0] / static_cast<double>(count[0]);
    for (size_t c = 1; c < static_cast<size_t>(cells); ++c) {
      const double score = beta[c] / static_cast<double>(count[c]);
      if (score > next_score) {
        next = c;
        next_score = score;
      }
    }
    const int i = static_cast<int>(next) / d;
    const int j = static_cast<int>(next) % d;
    observe(i, j, problems[i]->evaluate(config.grid[j], rng));
    ++used;
    if (config.record_allocation) out.ocba_allocation.emplace_back(i + 1, j);
  }

  size_t best = 0;
  for (size_t c = 1; c < static_cast<size_t>(cells); ++c)
    if (mean[c] > mean[best]) best = c;
  out.chosen = SystemId{static_cast<int>(best) / d + 1};
  out.samples_used = used;
  out.evaluations_used = used;
  out.budget_leftover = total - used;
  out.wall_time_s = clock.seconds();
  return out;
}

}  // namespace sbos
