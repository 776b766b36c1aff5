#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace trimfit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Immutable labeled collection. Rows of X are feature vectors; y holds the
/// regression response or, for classification, the class index stored as a
/// double in [0, 9].
struct Dataset {
  Matrix X;
  Vector y;
  bool classification = false;
  std::optional<std::vector<std::uint8_t>> outlier_mask;  // 1 = contaminated
  nlohmann::json provenance;

  int size() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }
  int label_at(int i) const { return static_cast<int>(y(i)); }
};

}  // namespace trimfit
