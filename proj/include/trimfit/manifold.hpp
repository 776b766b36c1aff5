#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trimfit/losses.hpp"
#include "trimfit/report.hpp"
#include "trimfit/trimmed.hpp"

namespace trimfit {

enum class SampleMode { deterministic, regression, mnist };

/// Scheduled sample size for the given radius; deterministic mode returns N.
int sample_schedule(double delta, int N, SampleMode mode);

/// Shared state for one solver run: the data, the loss model, and the
/// trimming/tolerance knobs the inner loop needs.
struct ObjectiveContext {
  const Dataset& data;
  const LossModel& model;
  double trim_fraction = 1.0;
  double tie_tol_scale = 1e-8;
  int generator_cap = 50;
  int loop_cap = 5;
};

struct ManifoldLoopResult {
  double tau = 0.0;
  Vector direction;
  std::vector<SelectionGradient> generators;
  int passes = 1;
  bool loop_capped = false;
};

/// Manifold sampling loop M: builds generators from the tuples active at w,
/// solves the ball-constrained min-max, probes w + d for newly active tuples
/// (their gradients and offsets evaluated at w), and re-solves until no new
/// tuple appears or loop_cap passes are spent.
ManifoldLoopResult manifold_loop(const Vector& w, double delta,
                                 const std::vector<int>& sample,
                                 const ObjectiveContext& ctx);

/// Sampled acceptance ratio: trimmed-value decrease over -tau. Requires
/// tau < 0; callers must route near-zero tau to a forced null step.
double acceptance_ratio(const Vector& w, const Vector& d, double tau,
                        const std::vector<int>& sample2,
                        const ObjectiveContext& ctx);

struct SolverConfig {
  double gamma_inc = 1.01;
  double gamma_dec = 0.99;
  double eta = 1e-3;
  double delta0 = 10.0;
  std::optional<Vector> w0;  // zeros when absent
  bool deterministic = false;
  SampleMode schedule = SampleMode::regression;  // used in stochastic mode
  std::optional<int> batch_override;             // fixed |S^k|=|S^{k'}|, tuning studies
  double delta_min = 0.01;                       // deterministic stop
  int epoch_budget = 100;                        // stochastic stop, in epochs
  double trim_fraction = 1.0;
  std::uint64_t seed = 0;
  int generator_cap = 50;
  int loop_cap = 5;

  nlohmann::json to_json() const;
};

/// Algorithm driver: deterministic (full-sample, stops at delta < delta_min)
/// or sample-based (stops when cumulative draws reach epoch_budget * N).
RunReport run_ms(const SolverConfig& config, const Dataset& data,
                 const LossModel& model);

}  // namespace trimfit
