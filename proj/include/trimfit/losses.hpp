#pragma once

#include <vector>

#include "trimfit/dataset.hpp"

namespace trimfit {

/// Per-point loss value together with the set of local gradients at the query
/// weights. The set has one element where the loss is differentiable and two
/// at an absolute-value kink.
struct LossEval {
  double value = 0.0;
  std::vector<Vector> gradients;
};

/// One smooth piece of a loss at the query weights: the piece's extended
/// value (signed, may differ from the loss value off its own region) and its
/// gradient there.
struct LossBranch {
  double value = 0.0;
  Vector gradient;
};

/// Scale-relative kink tolerance: 1e-8 * (1 + |prediction| + |label|).
double default_kink_tol(double prediction, double label);

/// Absolute loss |w.x - y|. At a kink (|residual| <= kink_tol) both sign
/// manifolds are reported, +x before -x.
LossEval abs_loss_eval(const Vector& w, const Vector& x, double y, double kink_tol);

/// Multiclass softmax loss -log p_c for logits z = W x, with W stored
/// row-major by class inside a flat weight vector (class 0's block first).
/// Logits are max-shifted before exponentiation.
LossEval softmax_loss_eval(const Vector& w_flat, int classes, const Vector& x, int cls);

/// argmax of W x; ties broken by lowest class index.
int predict_class(const Vector& w_flat, int classes, const Vector& x);

/// Loss-model interface the solvers consume: batched values plus local
/// gradient sets at individual indices.
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual int weight_dim(const Dataset& data) const = 0;
  virtual double value(const Vector& w, const Dataset& data, int i) const = 0;
  virtual LossEval eval(const Vector& w, const Dataset& data, int i) const = 0;

  /// Smooth branches active at branch_point, each extended back to w: the
  /// piece's value and gradient at w. Smooth losses have a single branch
  /// everywhere, so the default just evaluates at w; piecewise models
  /// override to pick the branch_point's piece(s).
  virtual std::vector<LossBranch> branches_at(const Vector& w, const Dataset& data,
                                              int i, const Vector& branch_point) const {
    (void)branch_point;
    LossEval e = eval(w, data, i);
    std::vector<LossBranch> out;
    out.reserve(e.gradients.size());
    for (auto& g : e.gradients) out.push_back({e.value, std::move(g)});
    return out;
  }

  /// Losses at the given indices, in index order.
  virtual Vector values(const Vector& w, const Dataset& data,
                        const std::vector<int>& idx) const;
};

class AbsoluteLoss final : public LossModel {
 public:
  int weight_dim(const Dataset& data) const override { return data.dim(); }
  double value(const Vector& w, const Dataset& data, int i) const override;
  LossEval eval(const Vector& w, const Dataset& data, int i) const override;
  std::vector<LossBranch> branches_at(const Vector& w, const Dataset& data, int i,
                                      const Vector& branch_point) const override;
  Vector values(const Vector& w, const Dataset& data,
                const std::vector<int>& idx) const override;
};

class SoftmaxLoss final : public LossModel {
 public:
  explicit SoftmaxLoss(int classes = 10) : classes_(classes) {}
  int classes() const { return classes_; }
  int weight_dim(const Dataset& data) const override { return classes_ * data.dim(); }
  double value(const Vector& w, const Dataset& data, int i) const override;
  LossEval eval(const Vector& w, const Dataset& data, int i) const override;

 private:
  int classes_;
};

}  // namespace trimfit
