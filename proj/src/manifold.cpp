#include "trimfit/manifold.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "trimfit/rng.hpp"
#include "trimfit/subproblem.hpp"

namespace trimfit {

int sample_schedule(double delta, int N, SampleMode mode) {
  if (!(delta > 0.0)) throw std::invalid_argument("sample_schedule: delta must be > 0");
  if (N < 1) throw std::invalid_argument("sample_schedule: N must be >= 1");
  double d4 = delta * delta * delta * delta;
  double s;
  switch (mode) {
    case SampleMode::deterministic:
      return N;
    case SampleMode::regression:
      s = std::max(0.01 * N, 1e-6 * N / d4);
      break;
    case SampleMode::mnist:
      s = std::max(40.0, 1e-6 / d4);
      break;
    default:
      throw std::invalid_argument("sample_schedule: unknown mode");
  }
  return std::min(N, static_cast<int>(std::ceil(s)));
}

namespace {

int trim_count(double trim_fraction, int sample_size) {
  return static_cast<int>(std::floor(trim_fraction * sample_size));
}

double tie_tol_for(const Vector& losses, int q, double scale) {
  std::vector<double> tmp(losses.data(), losses.data() + losses.size());
  std::nth_element(tmp.begin(), tmp.begin() + (q - 1), tmp.end());
  return scale * (1.0 + std::abs(tmp[q - 1]));
}

}  // namespace

ManifoldLoopResult manifold_loop(const Vector& w, double delta,
                                 const std::vector<int>& sample,
                                 const ObjectiveContext& ctx) {
  if (sample.empty()) throw std::invalid_argument("manifold_loop: empty sample");
  const int S = static_cast<int>(sample.size());
  const int q = trim_count(ctx.trim_fraction, S);
  if (q < 1)
    throw std::invalid_argument("manifold_loop: trim_fraction * |sample| < 1");

  const Vector losses_w = ctx.model.values(w, ctx.data, sample);
  const double h_w = trimmed_value(losses_w, q);

  ActiveTupleSet act =
      active_tuples(losses_w, q, tie_tol_for(losses_w, q, ctx.tie_tol_scale));

  // Branch sets at w itself, memoized per local index.
  std::vector<std::vector<LossBranch>> cache(S);
  std::vector<bool> cached(S, false);
  BranchProvider branches_w = [&](int j) -> std::vector<LossBranch> {
    if (!cached[j]) {
      cache[j] = ctx.model.branches_at(w, ctx.data, sample[j], w);
      cached[j] = true;
    }
    return cache[j];
  };
  GeneratorSet gens =
      build_branch_generators(enumerate_tuples(act, ctx.generator_cap), h_w, q,
                              branches_w, ctx.generator_cap);

  ManifoldLoopResult res;
  res.loop_capped = false;
  const int n = static_cast<int>(gens.items.front().gradient.size());

  for (int pass = 1;; ++pass) {
    const int m = static_cast<int>(gens.items.size());
    SubproblemInstance inst;
    inst.G.resize(m, n);
    inst.b.resize(m);
    for (int i = 0; i < m; ++i) {
      inst.G.row(i) = gens.items[i].gradient.transpose();
      inst.b(i) = gens.items[i].offset;
    }
    inst.radius = delta;
    SubproblemSolution sol = solve_minmax_ball(inst);
    res.tau = sol.tau;
    res.direction = sol.direction;
    res.passes = pass;

    if (pass >= ctx.loop_cap) {
      res.loop_capped = true;
      break;
    }

    // Probe the candidate step for manifolds not yet represented. A manifold
    // is a tuple plus the per-point smooth branch: take the branches active
    // at w + d, extended back to w for both gradient and offset. For
    // piecewise-linear losses this makes the model of each probed manifold
    // exact; offsets can go negative when the probed piece lies below the
    // loss at w. Without the branch part, a step that only flips the sign of
    // small residuals inside the active tuple would look already covered and
    // the loop would stall on a spurious descent direction.
    const Vector wd = w + sol.direction;
    const Vector losses_d = ctx.model.values(wd, ctx.data, sample);
    ActiveTupleSet act_d =
        active_tuples(losses_d, q, tie_tol_for(losses_d, q, ctx.tie_tol_scale));
    std::vector<std::vector<LossBranch>> cache_d(S);
    std::vector<bool> cached_d(S, false);
    BranchProvider branches_d = [&](int j) {
      if (!cached_d[j]) {
        cache_d[j] = ctx.model.branches_at(w, ctx.data, sample[j], wd);
        cached_d[j] = true;
      }
      return cache_d[j];
    };
    GeneratorSet extra =
        build_branch_generators(enumerate_tuples(act_d, ctx.generator_cap),
                                h_w, q, branches_d,
                                ctx.generator_cap);
    bool grew = false;
    for (auto& item : extra.items) {
      bool dup = false;
      for (const auto& existing : gens.items) {
        if ((existing.gradient - item.gradient).cwiseAbs().maxCoeff() <= 1e-12 &&
            std::abs(existing.offset - item.offset) <= 1e-12) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      if (static_cast<int>(gens.items.size()) >= ctx.generator_cap) {
        res.loop_capped = true;
        break;
      }
      gens.items.push_back(std::move(item));
      grew = true;
    }
    if (!grew) break;
  }

  res.generators = std::move(gens.items);
  return res;
}

double acceptance_ratio(const Vector& w, const Vector& d, double tau,
                        const std::vector<int>& sample2,
                        const ObjectiveContext& ctx) {
  if (!(tau < 0.0))
    throw std::logic_error("acceptance_ratio: requires tau < 0 (null steps are the caller's job)");
  const int q2 = trim_count(ctx.trim_fraction, static_cast<int>(sample2.size()));
  if (q2 < 1) throw std::invalid_argument("acceptance_ratio: trim_fraction * |sample2| < 1");
  double h_w = trimmed_value(ctx.model.values(w, ctx.data, sample2), q2);
  double h_wd = trimmed_value(ctx.model.values(w + d, ctx.data, sample2), q2);
  return (h_w - h_wd) / (-tau);
}

nlohmann::json SolverConfig::to_json() const {
  nlohmann::json j{{"gamma_inc", gamma_inc},
                   {"gamma_dec", gamma_dec},
                   {"eta", eta},
                   {"delta0", delta0},
                   {"mode", deterministic ? "deterministic" : "stochastic"},
                   {"schedule", schedule == SampleMode::mnist ? "mnist"
                                : schedule == SampleMode::regression ? "regression"
                                                                     : "deterministic"},
                   {"delta_min", delta_min},
                   {"epoch_budget", epoch_budget},
                   {"trim_fraction", trim_fraction},
                   {"seed", seed},
                   {"generator_cap", generator_cap},
                   {"loop_cap", loop_cap}};
  if (batch_override) j["batch_override"] = *batch_override;
  return j;
}

RunReport run_ms(const SolverConfig& config, const Dataset& data,
                 const LossModel& model) {
  using clock = std::chrono::steady_clock;
  const int N = data.size();
  if (N < 1) throw std::invalid_argument("run_ms: empty dataset");
  const int q_full = trim_count(config.trim_fraction, N);
  if (q_full < 1) throw std::invalid_argument("run_ms: trim_fraction * N < 1");

  const int n = model.weight_dim(data);
  Vector w = config.w0 ? *config.w0 : Vector::Zero(n);
  if (w.size() != n) throw std::invalid_argument("run_ms: w0 has wrong dimension");

  ObjectiveContext ctx{data, model, config.trim_fraction, 1e-8,
                       config.generator_cap, config.loop_cap};
  Rng rng(config.seed);
  std::vector<int> all_idx(N);
  std::iota(all_idx.begin(), all_idx.end(), 0);

  RunReport report;
  report.method = config.deterministic ? "DMS" : "SMS";
  report.config = config.to_json();
  report.seed = config.seed;

  double delta = config.delta0;
  std::uint64_t draws = 0;
  const std::uint64_t budget =
      static_cast<std::uint64_t>(std::max(config.epoch_budget, 0)) * N;

  const auto t_run = clock::now();
  for (int k = 0;; ++k) {
    if (config.deterministic) {
      if (delta < config.delta_min) break;
    } else {
      if (draws >= budget) break;
    }
    const auto t_iter = clock::now();

    std::vector<int> sample, sample2;
    if (config.deterministic) {
      sample = all_idx;
      sample2 = all_idx;
    } else {
      int s = config.batch_override
                  ? std::min(N, *config.batch_override)
                  : sample_schedule(delta, N, config.schedule);
      sample = rng.sample_without_replacement(N, s);
      sample2 = rng.sample_without_replacement(N, s);
      draws += 2 * static_cast<std::uint64_t>(s);
    }

    ManifoldLoopResult ml;
    double rho;
    try {
      ml = manifold_loop(w, delta, sample, ctx);
      rho = (ml.tau >= -1e-12)
                ? -std::numeric_limits<double>::infinity()  // forced null step
                : acceptance_ratio(w, ml.direction, ml.tau, sample2, ctx);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_ms: aborted at iteration " + std::to_string(k) +
                               ": " + e.what());
    }

    bool accepted = rho > config.eta;
    if (accepted) {
      w += ml.direction;
      if (!w.allFinite())
        throw std::runtime_error("run_ms: non-finite iterate at iteration " +
                                 std::to_string(k));
    }

    IterationTrace t;
    t.k = k;
    t.delta = delta;
    t.tau = ml.tau;
    t.rho = rho;
    t.sample_size_primary = static_cast<int>(sample.size());
    t.sample_size_secondary = static_cast<int>(sample2.size());
    t.accepted = accepted;
    t.generators_used = static_cast<int>(ml.generators.size());
    t.wall_s = std::chrono::duration<double>(clock::now() - t_iter).count();
    report.trace.push_back(t);

    delta *= accepted ? config.gamma_inc : config.gamma_dec;
  }

  report.final_w = w;
  report.final_objective = trimmed_value(model.values(w, data, all_idx), q_full);
  report.wall_s = std::chrono::duration<double>(clock::now() - t_run).count();
  return report;
}

}  // namespace trimfit
