#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trimfit/dataset.hpp"

namespace trimfit {

/// One solver iteration. For the subgradient baseline, delta carries the step
/// size and the trust-region fields are zero.
struct IterationTrace {
  int k = 0;
  double delta = 0.0;
  double tau = 0.0;
  double rho = 0.0;
  int sample_size_primary = 0;
  int sample_size_secondary = 0;
  bool accepted = false;
  int generators_used = 0;
  double wall_s = 0.0;
};

struct RunReport {
  std::string method;
  nlohmann::json config;
  std::vector<IterationTrace> trace;
  Vector final_w;
  double final_objective = 0.0;  // trimmed objective on the full dataset
  double wall_s = 0.0;
  std::uint64_t seed = 0;
  // Optional per-iterate recording for small diagnostic runs.
  std::vector<Vector> iterates;
  std::vector<Vector> subgradients;

  nlohmann::json to_json() const;
};

}  // namespace trimfit
