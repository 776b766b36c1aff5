#include "trimfit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trimfit {

std::vector<std::uint8_t> flag_outliers(const Vector& losses, int q) {
  const int N = static_cast<int>(losses.size());
  if (q < 1 || q > N) throw std::invalid_argument("flag_outliers: q out of range");
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  // Keep order (loss asc, index asc); the last N - q entries are flagged, so
  // at a tied boundary the higher index is flagged first.
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return losses(a) < losses(b); });
  std::vector<std::uint8_t> mask(N, 0);
  for (int j = q; j < N; ++j) mask[idx[j]] = 1;
  return mask;
}

ConfusionRates confusion_rates(const std::vector<std::uint8_t>& predicted,
                               const std::vector<std::uint8_t>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("confusion_rates: length mismatch");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] && predicted[i]) ++tp;
    else if (truth[i]) ++fn;
    else if (predicted[i]) ++fp;
    else ++tn;
  }
  ConfusionRates r;
  if (tp + fn > 0) r.tpr = 100.0 * tp / (tp + fn);
  r.fpr = (fp + tn > 0) ? 100.0 * fp / (fp + tn) : 0.0;
  return r;
}

double test_accuracy(const Vector& w_flat, int classes, const Dataset& test) {
  if (!test.classification)
    throw std::invalid_argument("test_accuracy: requires a classification dataset");
  int correct = 0;
  for (int i = 0; i < test.size(); ++i) {
    if (predict_class(w_flat, classes, test.X.row(i).transpose()) == test.label_at(i))
      ++correct;
  }
  return 100.0 * correct / test.size();
}

namespace {

double inlier_mean_abs(const Dataset& data, const std::vector<std::uint8_t>& inlier,
                       const Vector& w, int count) {
  double s = 0.0;
  for (int i = 0; i < data.size(); ++i)
    if (inlier[i]) s += std::abs(data.X.row(i).dot(w) - data.y(i));
  return s / count;
}

}  // namespace

Vector refit_inliers(const Dataset& data, const std::vector<std::uint8_t>& inlier_mask,
                     int budget, const Vector& w_start,
                     std::vector<double>* objective_trace) {
  if (static_cast<int>(inlier_mask.size()) != data.size())
    throw std::invalid_argument("refit_inliers: mask length mismatch");
  const int count = static_cast<int>(
      std::count(inlier_mask.begin(), inlier_mask.end(), std::uint8_t(1)));
  if (count < data.dim())
    throw std::invalid_argument("refit_inliers: underdetermined (inliers < dimension)");

  Vector w = w_start;
  Vector best_w = w;
  double best = inlier_mean_abs(data, inlier_mask, w, count);
  if (objective_trace) objective_trace->push_back(best);

  const double alpha = 0.1;
  for (int k = 1; k <= budget; ++k) {
    Vector g = Vector::Zero(data.dim());
    for (int i = 0; i < data.size(); ++i) {
      if (!inlier_mask[i]) continue;
      double r = data.X.row(i).dot(w) - data.y(i);
      if (r > 0) g += data.X.row(i).transpose();
      else if (r < 0) g -= data.X.row(i).transpose();
    }
    g /= count;
    w -= (alpha / std::sqrt(static_cast<double>(k))) * g;
    double obj = inlier_mean_abs(data, inlier_mask, w, count);
    if (obj < best) {
      best = obj;
      best_w = w;
    }
    if (objective_trace) objective_trace->push_back(best);
  }
  return best_w;
}

}  // namespace trimfit
