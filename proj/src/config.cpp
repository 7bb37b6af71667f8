#include "sbos/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sbos/csv.hpp"

namespace sbos {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail_field(const std::string& field, const std::string& what) {
  throw std::runtime_error("config field '" + field + "': " + what);
}

const ordered_json* find(const ordered_json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_number(const ordered_json& obj, const std::string& field,
                  double fallback) {
  const ordered_json* v = find(obj, field);
  if (!v) return fallback;
  if (!v->is_number()) fail_field(field, "expected a number");
  return v->get<double>();
}

int64_t get_integer(const ordered_json& obj, const std::string& field,
                    int64_t fallback) {
  const ordered_json* v = find(obj, field);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail_field(field, "expected an integer");
  return v->get<int64_t>();
}

bool get_bool(const ordered_json& obj, const std::string& field, bool fallback) {
  const ordered_json* v = find(obj, field);
  if (!v) return fallback;
  if (!v->is_boolean()) fail_field(field, "expected true or false");
  return v->get<bool>();
}

std::string get_string(const ordered_json& obj, const std::string& field,
                       const std::string& fallback) {
  const ordered_json* v = find(obj, field);
  if (!v) return fallback;
  if (!v->is_string()) fail_field(field, "expected a string");
  return v->get<std::string>();
}

std::vector<double> get_number_list(const ordered_json& obj,
                                    const std::string& field) {
  const ordered_json* v = find(obj, field);
  if (!v) return {};
  if (!v->is_array()) fail_field(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& item : *v) {
    if (!item.is_number()) fail_field(field, "expected an array of numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

FeasibleBox get_box(const ordered_json& obj, const std::string& field,
                    FeasibleBox fallback) {
  const ordered_json* v = find(obj, field);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() ||
      !(*v)[1].is_number())
    fail_field(field, "expected [lower, upper]");
  return {(*v)[0].get<double>(), (*v)[1].get<double>()};
}

FamilyParams parse_instance(const std::string& family, const ordered_json& inst) {
  if (family == "synthetic") {
    SyntheticParams p;
    p.gaps = get_number_list(inst, "gaps");
    if (p.gaps.empty()) {
      const int k = static_cast<int>(get_integer(inst, "K", 0));
      if (k < 1) fail_field("instance.K", "synthetic needs gaps or K");
      const double gap = get_number(inst, "gap", 0.5);
      p.gaps.assign(k, gap);
      p.gaps[0] = 0.0;
    }
    p.noise_sd = get_number(inst, "noise_sd", p.noise_sd);
    p.gradient_noise_sd = get_number(inst, "gradient_noise_sd", p.gradient_noise_sd);
    p.curvature = get_number(inst, "curvature", p.curvature);
    p.top_value = get_number(inst, "top_value", p.top_value);
    p.box = get_box(inst, "box", p.box);
    return p;
  }
  if (family == "grid-trap") {
    GridTrapParams p;
    p.system_count = static_cast<int>(get_integer(inst, "K", p.system_count));
    const auto grid = get_number_list(inst, "grid");
    if (!grid.empty()) p.grid = grid;
    p.gap_index = static_cast<int>(get_integer(inst, "gap_index", p.gap_index));
    p.slope = get_number(inst, "slope", p.slope);
    p.noise_sd = get_number(inst, "noise_sd", p.noise_sd);
    p.gradient_noise_sd =
        get_number(inst, "gradient_noise_sd", p.gradient_noise_sd);
    p.decoy_offset = get_number(inst, "decoy_offset", p.decoy_offset);
    return p;
  }
  if (family == "dosage") {
    DosageParams p;
    p.system_count = static_cast<int>(get_integer(inst, "K", p.system_count));
    p.a_star = get_number(inst, "a_star", p.a_star);
    p.b_star = get_number(inst, "b_star", p.b_star);
    p.c_star = get_number(inst, "c_star", p.c_star);
    p.perturbation_range =
        get_number(inst, "perturbation_range", p.perturbation_range);
    p.noise_sd = get_number(inst, "noise_sd", p.noise_sd);
    p.fd_delta = get_number(inst, "fd_delta", p.fd_delta);
    p.box = get_box(inst, "box", p.box);
    return p;
  }
  if (family == "newsvendor") {
    NewsvendorParams p;
    p.system_count = static_cast<int>(get_integer(inst, "K", p.system_count));
    p.prices = get_number_list(inst, "prices");
    p.costs = get_number_list(inst, "costs");
    p.rates = get_number_list(inst, "rates");
    return p;
  }
  if (family == "queueing") {
    QueueingParams p;
    p.staff_pool = static_cast<int>(get_integer(inst, "K", p.staff_pool));
    p.lambda0 = get_number(inst, "lambda0", p.lambda0);
    p.horizon = get_number(inst, "horizon", p.horizon);
    if (find(inst, "mu1")) p.mu1 = get_number(inst, "mu1", 0.0);
    if (find(inst, "mu2")) p.mu2 = get_number(inst, "mu2", 0.0);
    p.sigma1 = get_number(inst, "sigma1", p.sigma1);
    p.sigma2 = get_number(inst, "sigma2", p.sigma2);
    p.rho = get_number(inst, "rho", p.rho);
    if (find(inst, "patience_shape"))
      p.patience_shape = get_number(inst, "patience_shape", 0.0);
    p.patience_rate = get_number(inst, "patience_rate", p.patience_rate);
    p.wait_penalty = get_number(inst, "wait_penalty", p.wait_penalty);
    p.fd_delta = get_number(inst, "fd_delta", p.fd_delta);
    p.wait_includes_abandoned =
        get_bool(inst, "wait_includes_abandoned", p.wait_includes_abandoned);
    p.count_station_one_completions = get_bool(
        inst, "count_station_one_completions", p.count_station_one_completions);
    return p;
  }
  fail_field("family", "unknown family '" + family +
                           "' (expected synthetic, grid-trap, dosage, "
                           "newsvendor, or queueing)");
}

ordered_json instance_to_json(const FamilyParams& params) {
  ordered_json inst;
  struct Writer {
    ordered_json& inst;
    void operator()(const SyntheticParams& p) const {
      inst["gaps"] = p.gaps;
      inst["noise_sd"] = p.noise_sd;
      inst["gradient_noise_sd"] = p.gradient_noise_sd;
      inst["curvature"] = p.curvature;
      inst["top_value"] = p.top_value;
      inst["box"] = {p.box.lower, p.box.upper};
    }
    void operator()(const GridTrapParams& p) const {
      inst["K"] = p.system_count;
      inst["grid"] = p.grid;
      inst["gap_index"] = p.gap_index;
      inst["slope"] = p.slope;
      inst["noise_sd"] = p.noise_sd;
      inst["gradient_noise_sd"] = p.gradient_noise_sd;
      inst["decoy_offset"] = p.decoy_offset;
    }
    void operator()(const DosageParams& p) const {
      inst["K"] = p.system_count;
      inst["a_star"] = p.a_star;
      inst["b_star"] = p.b_star;
      inst["c_star"] = p.c_star;
      inst["perturbation_range"] = p.perturbation_range;
      inst["noise_sd"] = p.noise_sd;
      inst["fd_delta"] = p.fd_delta;
      inst["box"] = {p.box.lower, p.box.upper};
    }
    void operator()(const NewsvendorParams& p) const {
      inst["K"] = p.system_count;
      if (!p.prices.empty()) inst["prices"] = p.prices;
      if (!p.costs.empty()) inst["costs"] = p.costs;
      if (!p.rates.empty()) inst["rates"] = p.rates;
    }
    void operator()(const QueueingParams& p) const {
      inst["K"] = p.staff_pool;
      inst["lambda0"] = p.lambda0;
      inst["horizon"] = p.horizon;
      if (p.mu1) inst["mu1"] = *p.mu1;
      if (p.mu2) inst["mu2"] = *p.mu2;
      inst["sigma1"] = p.sigma1;
      inst["sigma2"] = p.sigma2;
      inst["rho"] = p.rho;
      if (p.patience_shape) inst["patience_shape"] = *p.patience_shape;
      inst["patience_rate"] = p.patience_rate;
      inst["wait_penalty"] = p.wait_penalty;
      inst["fd_delta"] = p.fd_delta;
      inst["wait_includes_abandoned"] = p.wait_includes_abandoned;
      inst["count_station_one_completions"] = p.count_station_one_completions;
    }
  };
  std::visit(Writer{inst}, params);
  return inst;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    size_t line = 1, column = 1;
    for (size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw std::runtime_error("config parse error at line " +
                             std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + e.what());
  }
  if (!root.is_object())
    throw std::runtime_error("config: top level must be a JSON object");

  RunConfig config;
  ExperimentPlan& plan = config.plan;
  plan.name = get_string(root, "experiment", plan.name);
  if (plan.name.empty() ||
      plan.name.find_first_of(",\n/\\") != std::string::npos)
    fail_field("experiment",
               "must be non-empty and free of commas, slashes and newlines");

  const std::string policy = get_string(root, "policy", "seo-sgd");
  const auto parsed_policy = parse_policy(policy);
  if (!parsed_policy)
    fail_field("policy", "unknown policy '" + policy +
                             "' (expected seo-sgd, seo-saa, uniform-sgd, "
                             "uniform-saa, or ocba)");
  plan.policy = *parsed_policy;

  if (const ordered_json* v = find(root, "policies")) {
    if (!v->is_array()) fail_field("policies", "expected an array of strings");
    for (const auto& item : *v) {
      if (!item.is_string()) fail_field("policies", "expected an array of strings");
      const std::string name = item.get<std::string>();
      if (!parse_policy(name))
        fail_field("policies", "unknown policy '" + name + "'");
      config.policies.push_back(name);
    }
  }

  const std::string family = get_string(root, "family", "");
  if (family.empty()) fail_field("family", "required");
  const ordered_json empty = ordered_json::object();
  const ordered_json* inst = find(root, "instance");
  if (inst && !inst->is_object()) fail_field("instance", "expected an object");
  plan.instance.params = parse_instance(family, inst ? *inst : empty);

  if (const ordered_json* v = find(root, "budgets")) {
    if (!v->is_array()) fail_field("budgets", "expected an array of integers");
    for (const auto& item : *v) {
      if (!item.is_number_integer())
        fail_field("budgets", "expected an array of integers");
      plan.budgets.push_back(item.get<int64_t>());
    }
  }
  if (plan.budgets.empty()) fail_field("budgets", "required and non-empty");
  for (size_t i = 1; i < plan.budgets.size(); ++i) {
    if (plan.budgets[i] <= plan.budgets[i - 1])
      fail_field("budgets", "must be strictly increasing (entry " +
                                std::to_string(i + 1) + " is not)");
  }

  plan.replications =
      static_cast<int>(get_integer(root, "replications", plan.replications));
  if (plan.replications < 1) fail_field("replications", "must be >= 1");
  plan.base_seed = static_cast<uint64_t>(
      get_integer(root, "base_seed", static_cast<int64_t>(plan.base_seed)));
  if (find(root, "gamma0")) plan.gamma0 = get_number(root, "gamma0", 0.0);
  if (find(root, "initial_point"))
    plan.initial_point = get_number(root, "initial_point", 0.0);
  plan.warm_start = get_bool(root, "warm_start", plan.warm_start);
  plan.ocba_alpha0 = get_number(root, "ocba_alpha0", plan.ocba_alpha0);
  plan.ocba_grid = get_number_list(root, "ocba_grid");
  plan.threads = static_cast<int>(get_integer(root, "threads", plan.threads));
  plan.min_gap = get_number(root, "min_gap", plan.min_gap);
  plan.regenerate_instance_per_rep = get_bool(
      root, "regenerate_instance_per_rep", plan.regenerate_instance_per_rep);
  plan.pilot_budget_factor = static_cast<int>(
      get_integer(root, "pilot_budget_factor", plan.pilot_budget_factor));

  config.output_dir = get_string(root, "output_dir", config.output_dir);
  config.chart = get_bool(root, "chart", config.chart);
  config.pilot_diag = get_bool(root, "pilot_diag", config.pilot_diag);
  return config;
}

std::string serialize_config(const RunConfig& config) {
  const ExperimentPlan& plan = config.plan;
  ordered_json root;
  root["experiment"] = plan.name;
  root["policy"] = policy_name(plan.policy);
  if (!config.policies.empty()) root["policies"] = config.policies;
  root["family"] = family_name(plan.instance);
  root["instance"] = instance_to_json(plan.instance.params);
  root["budgets"] = plan.budgets;
  root["replications"] = plan.replications;
  root["base_seed"] = plan.base_seed;
  if (plan.gamma0) root["gamma0"] = *plan.gamma0;
  if (plan.initial_point) root["initial_point"] = *plan.initial_point;
  root["warm_start"] = plan.warm_start;
  root["ocba_alpha0"] = plan.ocba_alpha0;
  if (!plan.ocba_grid.empty()) root["ocba_grid"] = plan.ocba_grid;
  root["threads"] = plan.threads;
  root["min_gap"] = plan.min_gap;
  root["regenerate_instance_per_rep"] = plan.regenerate_instance_per_rep;
  root["pilot_budget_factor"] = plan.pilot_budget_factor;
  root["output_dir"] = config.output_dir;
  root["chart"] = config.chart;
  root["pilot_diag"] = config.pilot_diag;
  return root.dump(2) + "\n";
}

RunConfig load_config_file(const std::string& path) {
  return parse_config(read_file(path));
}

}  // namespace sbos
