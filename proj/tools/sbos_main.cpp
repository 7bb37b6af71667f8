#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbos/chart.hpp"
#include "sbos/config.hpp"
#include "sbos/csv.hpp"
#include "sbos/harness.hpp"

namespace {

struct CommonOverrides {
  std::optional<std::string> output_dir;
  std::optional<uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, std::string& config_path, CommonOverrides& over) {
  cmd->add_option("-c,--config", config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("-o,--out", over.output_dir, "output directory");
  cmd->add_option("--seed", over.seed, "override base_seed");
  cmd->add_option("--replications", over.replications, "override replications");
  cmd->add_option("--threads", over.threads,
                  "worker threads (0 = auto; falls back to SBOS_THREADS)");
}

sbos::RunConfig load_with_overrides(const std::string& path,
                                    const CommonOverrides& over) {
  sbos::RunConfig config = sbos::load_config_file(path);
  if (over.output_dir) config.output_dir = *over.output_dir;
  if (over.seed) config.plan.base_seed = *over.seed;
  if (over.replications) config.plan.replications = *over.replications;
  if (over.threads) {
    config.plan.threads = *over.threads;
  } else if (const char* env = std::getenv("SBOS_THREADS")) {
    config.plan.threads = std::atoi(env);
  }
  return config;
}

std::vector<sbos::ResultRow> run_policies(const sbos::RunConfig& config,
                                          const std::vector<sbos::Policy>& policies) {
  // Validate every pairing before spending any budget.
  for (const sbos::Policy policy : policies) {
    sbos::ExperimentPlan plan = config.plan;
    plan.policy = policy;
    sbos::validate_plan(plan);
  }
  std::vector<sbos::ResultRow> rows;
  for (const sbos::Policy policy : policies) {
    sbos::ExperimentPlan plan = config.plan;
    plan.policy = policy;
    const sbos::ExperimentResult result = sbos::run_experiment(plan);
    for (const sbos::PfsEstimate& point : result.points) {
      sbos::ResultRow row;
      row.experiment = plan.name;
      row.policy = sbos::policy_name(policy);
      row.family = sbos::family_name(plan.instance);
      row.system_count = result.system_count;
      row.budget = point.budget;
      row.replications = point.replications;
      row.pcs = point.pcs;
      row.stderr_ = point.stderr_;
      row.mean_evaluations = point.mean_evaluations;
      row.base_seed = plan.base_seed;
      row.wall_time_s = point.wall_time_s;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void print_summary(const std::vector<sbos::ResultRow>& rows) {
  std::printf("%-14s %10s %8s %8s %14s %10s\n", "policy", "T", "pcs", "stderr",
              "mean_evals", "time_s");
  for (const sbos::ResultRow& r : rows) {
    std::printf("%-14s %10lld %8.4f %8.4f %14.1f %10.3f\n", r.policy.c_str(),
                static_cast<long long>(r.budget), r.pcs, r.stderr_,
                r.mean_evaluations, r.wall_time_s);
  }
}

void emit_outputs(const sbos::RunConfig& config,
                  const std::vector<sbos::ResultRow>& rows,
                  const std::string& suffix) {
  const std::string csv = sbos::to_csv(rows);
  const std::string csv_path =
      config.output_dir + "/" + config.plan.name + suffix + ".csv";
  sbos::write_file_atomic(csv_path, csv);
  std::printf("wrote %s\n", csv_path.c_str());
  if (config.chart) {
    sbos::ChartOptions options;
    options.title = config.plan.name;
    const std::string svg_path =
        config.output_dir + "/" + config.plan.name + suffix + ".svg";
    sbos::write_file_atomic(svg_path, sbos::render_chart(rows, options));
    std::printf("wrote %s\n", svg_path.c_str());
  }
  print_summary(rows);
}

int cmd_run(const std::string& config_path, const CommonOverrides& over) {
  const sbos::RunConfig config = load_with_overrides(config_path, over);
  const auto rows = run_policies(config, {config.plan.policy});
  emit_outputs(config, rows, "");
  return 0;
}

int cmd_sweep(const std::string& config_path, const CommonOverrides& over,
              const std::vector<std::string>& policy_names) {
  const sbos::RunConfig config = load_with_overrides(config_path, over);
  std::vector<std::string> names =
      policy_names.empty() ? config.policies : policy_names;
  if (names.empty())
    throw std::runtime_error(
        "sweep: no policies given (use --policies or the config's 'policies')");
  std::vector<sbos::Policy> policies;
  for (const std::string& name : names) {
    const auto policy = sbos::parse_policy(name);
    if (!policy) throw std::runtime_error("sweep: unknown policy '" + name + "'");
    policies.push_back(*policy);
  }
  const auto rows = run_policies(config, policies);
  emit_outputs(config, rows, "-sweep");
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path,
             bool log_pfs, const std::string& title) {
  const auto rows = sbos::parse_result_csv(sbos::read_file(csv_path));
  sbos::ChartOptions options;
  options.log_pfs = log_pfs;
  options.title = title;
  sbos::write_file_atomic(out_path, sbos::render_chart(rows, options));
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_diag(const std::string& config_path, const CommonOverrides& over,
             bool pilot_flag) {
  const sbos::RunConfig config = load_with_overrides(config_path, over);
  sbos::RngStream instance_rng =
      sbos::derive_stream(config.plan.base_seed, 0, "instance");
  const sbos::BuiltInstance built =
      sbos::make_instance(config.plan.instance, instance_rng);
  const auto diag = sbos::diagnostics(built.problems, config.plan.min_gap);
  if (!diag) {
    if (!(pilot_flag || config.pilot_diag))
      throw std::runtime_error(
          "family '" + built.family +
          "' has no true-value oracle; pass --pilot (or set pilot_diag) to "
          "estimate the best system from a high-budget pilot");
    const sbos::SystemId best = sbos::pilot_best(built, config.plan);
    std::printf("family=%s K=%d oracle=none\n", built.family.c_str(),
                built.system_count);
    std::printf("pilot best system: %d (3 agreeing pilots at %dx budget)\n",
                best.index, config.plan.pilot_budget_factor);
    return 0;
  }
  std::printf("family=%s K=%d best=%d H2=%.6g\n", built.family.c_str(),
              built.system_count, diag->best.index, diag->h2);
  std::printf("%6s %16s %16s\n", "system", "value", "gap");
  for (size_t i = 0; i < diag->values.size(); ++i)
    std::printf("%6zu %16.6f %16.6f\n", i + 1, diag->values[i], diag->gaps[i]);
  return 0;
}

int cmd_list_problems() {
  std::printf(
      "synthetic    gradient  concave quadratics with known values; knobs: "
      "gaps|K+gap, noise_sd, gradient_noise_sd, curvature, top_value, box\n"
      "grid-trap    gradient  two systems identical on the OCBA grid, peak "
      "hidden off-grid; knobs: K, grid, gap_index, slope, noise_sd, "
      "decoy_offset\n"
      "dosage       gradient  perturbed quadratic dose-response, FD "
      "gradients; knobs: K, noise_sd, fd_delta, perturbation_range, box\n"
      "newsvendor   data      Poisson demand with closed-form SAA; knobs: K, "
      "prices, costs, rates\n"
      "queueing     gradient  two-station simulation with price decision; "
      "knobs: K, lambda0, horizon, service/patience params, wait_penalty\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fixed-budget selection among systems with inner-layer optimization"};
  app.require_subcommand(1);

  std::string run_config, sweep_config, diag_config;
  CommonOverrides run_over, sweep_over, diag_over;
  std::vector<std::string> sweep_policies;
  std::string plot_csv, plot_out = "chart.svg", plot_title;
  bool plot_log_pfs = false;
  bool diag_pilot = false;

  CLI::App* run = app.add_subcommand("run", "execute one policy over a budget grid");
  add_common(run, run_config, run_over);

  CLI::App* sweep =
      app.add_subcommand("sweep", "compare several policies on one instance");
  add_common(sweep, sweep_config, sweep_over);
  sweep->add_option("--policies", sweep_policies,
                    "policies to compare (default: config 'policies')")
      ->delimiter(',');

  CLI::App* plot = app.add_subcommand("plot", "render a result CSV as SVG");
  plot->add_option("--csv", plot_csv, "result CSV path")->required();
  plot->add_option("-o,--out", plot_out, "output SVG path");
  plot->add_flag("--log-pfs", plot_log_pfs, "plot log10 PFS instead of PCS");
  plot->add_option("--title", plot_title, "chart title");

  CLI::App* diag =
      app.add_subcommand("diag", "print instance true values, gaps and H2");
  add_common(diag, diag_config, diag_over);
  diag->add_flag("--pilot", diag_pilot,
                 "allow a pilot-run best estimate for oracle-less families");

  CLI::App* list = app.add_subcommand("list-problems", "describe the families");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_over);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_over, sweep_policies);
    if (plot->parsed())
      return cmd_plot(plot_csv, plot_out, plot_log_pfs, plot_title);
    if (diag->parsed()) return cmd_diag(diag_config, diag_over, diag_pilot);
    if (list->parsed()) return cmd_list_problems();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
