#pragma once

#include <cstdint>

#include "trimfit/losses.hpp"
#include "trimfit/report.hpp"

namespace trimfit {

/// Stochastic subgradient descent on the trimmed objective. Defaults follow
/// the tuning study: alpha = 0.1, no decay, batch 40. trim_fraction = 1 gives
/// the untrimmed SGD reference.
struct SSGDConfig {
  double alpha = 0.1;
  double delta_decay = 0.0;  // step size alpha / k^delta_decay, k from 1
  int batch = 40;
  double trim_fraction = 1.0;
  int epoch_budget = 100;
  std::uint64_t seed = 0;
  std::optional<Vector> w0;
  bool record_iterates = false;  // keep (w, g) history; small runs only

  nlohmann::json to_json() const;
};

/// Lexicographic trimmed subgradient over the sample: mean of the first local
/// gradients of the q_s = floor(trim_fraction * |sample|) smallest losses,
/// ties resolved by (loss, position) order.
Vector trimmed_subgradient(const Vector& w, const std::vector<int>& sample,
                           double trim_fraction, const Dataset& data,
                           const LossModel& model);

RunReport run_ssgd(const SSGDConfig& config, const Dataset& data,
                   const LossModel& model);

}  // namespace trimfit
