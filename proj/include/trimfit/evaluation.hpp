#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trimfit/losses.hpp"

namespace trimfit {

struct ConfusionRates {
  std::optional<double> tpr;  // absent when there are no true outliers
  double fpr = 0.0;
};

/// Flags exactly N - q indices: those with the largest losses, boundary ties
/// broken by flagging the higher index first.
std::vector<std::uint8_t> flag_outliers(const Vector& losses, int q);

ConfusionRates confusion_rates(const std::vector<std::uint8_t>& predicted,
                               const std::vector<std::uint8_t>& truth);

/// Percent of test points whose predicted class equals the true class.
double test_accuracy(const Vector& w_flat, int classes, const Dataset& test);

/// Mean-absolute-loss refit over the inliers by full-batch subgradient
/// descent (alpha = 0.1, 1/sqrt(k) decay) from w_start; returns the best
/// iterate seen, so the inlier objective never exceeds the input's.
Vector refit_inliers(const Dataset& data, const std::vector<std::uint8_t>& inlier_mask,
                     int budget, const Vector& w_start,
                     std::vector<double>* objective_trace = nullptr);

}  // namespace trimfit
