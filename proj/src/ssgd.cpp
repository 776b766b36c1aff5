#include "trimfit/ssgd.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trimfit/rng.hpp"
#include "trimfit/trimmed.hpp"

namespace trimfit {

Vector trimmed_subgradient(const Vector& w, const std::vector<int>& sample,
                           double trim_fraction, const Dataset& data,
                           const LossModel& model) {
  if (sample.empty()) throw std::invalid_argument("trimmed_subgradient: empty sample");
  const int S = static_cast<int>(sample.size());
  const int q = static_cast<int>(std::floor(trim_fraction * S));
  if (q < 1) throw std::invalid_argument("trimmed_subgradient: trim_fraction * |sample| < 1");

  Vector losses = model.values(w, data, sample);
  std::vector<int> tuple = lexicographic_tuple(losses, q);
  Vector g = Vector::Zero(model.weight_dim(data));
  for (int j : tuple) {
    // First local gradient in canonical order (+x branch at abs-loss kinks).
    g += model.eval(w, data, sample[j]).gradients.front();
  }
  return g / q;
}

nlohmann::json SSGDConfig::to_json() const {
  return nlohmann::json{{"alpha", alpha},         {"delta_decay", delta_decay},
                        {"batch", batch},         {"trim_fraction", trim_fraction},
                        {"epoch_budget", epoch_budget}, {"seed", seed}};
}

RunReport run_ssgd(const SSGDConfig& config, const Dataset& data,
                   const LossModel& model) {
  using clock = std::chrono::steady_clock;
  const int N = data.size();
  if (N < 1) throw std::invalid_argument("run_ssgd: empty dataset");
  if (config.batch < 1 || config.batch > N)
    throw std::invalid_argument("run_ssgd: batch size out of range");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("run_ssgd: alpha must be > 0");
  if (config.delta_decay < 0.0)
    throw std::invalid_argument("run_ssgd: decay must be >= 0");

  const int n = model.weight_dim(data);
  Vector w = config.w0 ? *config.w0 : Vector::Zero(n);
  if (w.size() != n) throw std::invalid_argument("run_ssgd: w0 has wrong dimension");

  Rng rng(config.seed);
  RunReport report;
  report.method = config.trim_fraction >= 1.0 ? "SGD" : "SSGD";
  report.config = config.to_json();
  report.seed = config.seed;

  const std::uint64_t budget =
      static_cast<std::uint64_t>(std::max(config.epoch_budget, 0)) * N;
  std::uint64_t draws = 0;

  const auto t_run = clock::now();
  for (int k = 1; draws < budget; ++k) {
    const auto t_iter = clock::now();
    std::vector<int> sample = rng.sample_without_replacement(N, config.batch);
    draws += config.batch;

    Vector g = trimmed_subgradient(w, sample, config.trim_fraction, data, model);
    const double step = config.alpha / std::pow(static_cast<double>(k), config.delta_decay);
    w -= step * g;
    if (!w.allFinite())
      throw std::runtime_error("run_ssgd: non-finite iterate at iteration " +
                               std::to_string(k));

    IterationTrace t;
    t.k = k;
    t.delta = step;
    t.sample_size_primary = config.batch;
    t.accepted = true;
    t.wall_s = std::chrono::duration<double>(clock::now() - t_iter).count();
    report.trace.push_back(t);
    if (config.record_iterates) {
      report.iterates.push_back(w);
      report.subgradients.push_back(g);
    }
  }

  std::vector<int> all_idx(N);
  std::iota(all_idx.begin(), all_idx.end(), 0);
  const int q_full = static_cast<int>(std::floor(config.trim_fraction * N));
  report.final_w = w;
  report.final_objective =
      trimmed_value(model.values(w, data, all_idx), std::max(1, q_full));
  report.wall_s = std::chrono::duration<double>(clock::now() - t_run).count();
  return report;
}

}  // namespace trimfit
