#include "sbos/problems/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace sbos {

namespace {

class SyntheticQuadratic final : public InnerProblem {
 public:
  SyntheticQuadratic(FeasibleBox box, double value, double optimum,
                     double curvature, double noise_sd, double gradient_noise_sd)
      : box_(box),
        value_(value),
        optimum_(optimum),
        curvature_(curvature),
        noise_sd_(noise_sd),
        gradient_noise_sd_(gradient_noise_sd) {}

  FeasibleBox feasible() const override { return box_; }
  InnerMode mode() const override { return InnerMode::kGradient; }

  double evaluate(double x, RngStream& rng) const override {
    const double dx = x - optimum_;
    double v = value_ - curvature_ * dx * dx;
    if (noise_sd_ > 0.0) v += noise_sd_ * rng.normal();
    return v;
  }

  GradientSample sample(double x, RngStream& rng) const override {
    GradientSample out;
    out.value = evaluate(x, rng);
    out.gradient = -2.0 * curvature_ * (x - optimum_);
    if (gradient_noise_sd_ > 0.0) out.gradient += gradient_noise_sd_ * rng.normal();
    out.evals = 1;
    return out;
  }

  std::optional<double> true_value() const override { return value_; }

 private:
  FeasibleBox box_;
  double value_;
  double optimum_;
  double curvature_;
  double noise_sd_;
  double gradient_noise_sd_;
};

// Tent -slope*|x - peak| + offset with an optional flat plateau over
// [plateau_lo, plateau_hi] pinned at the plateau-edge value.
class TentProblem final : public InnerProblem {
 public:
  TentProblem(FeasibleBox box, double peak, double slope, double offset,
              bool plateau, double plateau_lo, double plateau_hi,
              double noise_sd, double gradient_noise_sd)
      : box_(box),
        peak_(peak),
        slope_(slope),
        offset_(offset),
        plateau_(plateau),
        plateau_lo_(plateau_lo),
        plateau_hi_(plateau_hi),
        noise_sd_(noise_sd),
        gradient_noise_sd_(gradient_noise_sd) {}

  FeasibleBox feasible() const override { return box_; }
  InnerMode mode() const override { return InnerMode::kGradient; }

  double mean_at(double x) const {
    if (plateau_ && x > plateau_lo_ && x < plateau_hi_)
      return offset_ - slope_ * (peak_ - plateau_lo_);
    return offset_ - slope_ * std::fabs(x - peak_);
  }

  double evaluate(double x, RngStream& rng) const override {
    double v = mean_at(x);
    if (noise_sd_ > 0.0) v += noise_sd_ * rng.normal();
    return v;
  }

  GradientSample sample(double x, RngStream& rng) const override {
    GradientSample out;
    out.value = evaluate(x, rng);
    double g;
    if (plateau_ && x > plateau_lo_ && x < plateau_hi_) {
      g = 0.0;
    } else if (x == peak_) {
      g = 0.0;
    } else {
      g = x < peak_ ? slope_ : -slope_;
    }
    out.gradient = g;
    if (gradient_noise_sd_ > 0.0) out.gradient += gradient_noise_sd_ * rng.normal();
    out.evals = 1;
    return out;
  }

  std::optional<double> true_value() const override {
    if (plateau_) return offset_ - slope_ * (peak_ - plateau_lo_);
    return offset_;
  }

 private:
  FeasibleBox box_;
  double peak_;
  double slope_;
  double offset_;
  bool plateau_;
  double plateau_lo_;
  double plateau_hi_;
  double noise_sd_;
  double gradient_noise_sd_;
};

}  // namespace

ProblemList synthetic_gaussian_family(const SyntheticParams& params) {
  const int k = static_cast<int>(params.gaps.size());
  if (k < 1) throw std::invalid_argument("synthetic family: no systems");
  if (params.gaps.front() != 0.0)
    throw std::invalid_argument("synthetic family: gaps[0] must be 0");
  for (int i = 1; i < k; ++i) {
    if (params.gaps[i] <= 0.0)
      throw std::invalid_argument("synthetic family: non-best gaps must be > 0");
  }
  if (params.curvature <= 0.0)
    throw std::invalid_argument("synthetic family: curvature must be > 0");
  const double grad_sd =
      params.gradient_noise_sd < 0.0 ? params.noise_sd : params.gradient_noise_sd;

  ProblemList problems;
  problems.reserve(k);
  for (int i = 0; i < k; ++i) {
    const double frac = static_cast<double>(i + 1) / static_cast<double>(k + 1);
    const double optimum = params.box.lower + frac * params.box.width();
    problems.push_back(std::make_unique<SyntheticQuadratic>(
        params.box, params.top_value - params.gaps[i], optimum, params.curvature,
        params.noise_sd, grad_sd));
  }
  return problems;
}

SyntheticParams synthetic_uniform_gaps(int k, double gap, double noise_sd) {
  SyntheticParams params;
  params.gaps.assign(k, gap);
  params.gaps[0] = 0.0;
  params.noise_sd = noise_sd;
  return params;
}

double h2_complexity(const std::vector<double>& gaps) {
  if (gaps.size() < 2) throw std::invalid_argument("h2_complexity: need K >= 2");
  double h2 = 0.0;
  for (size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i] <= 0.0) throw std::invalid_argument("h2_complexity: gap <= 0");
    h2 = std::max(h2, static_cast<double>(i + 1) / (gaps[i] * gaps[i]));
  }
  return h2;
}

ProblemList grid_trap_family(const GridTrapParams& params) {
  const int k = params.system_count;
  if (k < 2) throw std::invalid_argument("grid trap: need K >= 2");
  const int d = static_cast<int>(params.grid.size());
  if (d < 2) throw std::invalid_argument("grid trap: grid needs >= 2 points");
  if (params.gap_index < 0 || params.gap_index + 1 >= d)
    throw std::invalid_argument("grid trap: gap_index out of range");
  for (int j = 1; j < d; ++j) {
    if (!(params.grid[j] > params.grid[j - 1]))
      throw std::invalid_argument("grid trap: grid must be strictly increasing");
  }
  const double lo = params.grid[params.gap_index];
  const double hi = params.grid[params.gap_index + 1];
  const double peak = 0.5 * (lo + hi);
  const FeasibleBox box{params.grid.front(), params.grid.back()};

  ProblemList problems;
  problems.reserve(k);
  // System 1 owns the off-grid peak.
  problems.push_back(std::make_unique<TentProblem>(
      box, peak, params.slope, 0.0, false, 0.0, 0.0, params.noise_sd,
      params.gradient_noise_sd));
  // System 2 matches it at every grid point but is flat across the gap.
  problems.push_back(std::make_unique<TentProblem>(
      box, peak, params.slope, 0.0, true, lo, hi, params.noise_sd,
      params.gradient_noise_sd));
  for (int i = 3; i <= k; ++i) {
    const double offset =
        -params.slope * (peak - lo) - params.decoy_offset * (i - 2);
    problems.push_back(std::make_unique<TentProblem>(
        box, peak, params.slope, offset, false, 0.0, 0.0, params.noise_sd,
        params.gradient_noise_sd));
  }
  return problems;
}

}  // namespace sbos
