#include "trimfit/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trimfit {

double default_kink_tol(double prediction, double label) {
  return 1e-8 * (1.0 + std::abs(prediction) + std::abs(label));
}

LossEval abs_loss_eval(const Vector& w, const Vector& x, double y, double kink_tol) {
  if (w.size() != x.size())
    throw std::invalid_argument("abs_loss_eval: weight/feature dimension mismatch");
  if (kink_tol < 0.0) throw std::invalid_argument("abs_loss_eval: kink_tol must be >= 0");
  double r = w.dot(x) - y;
  LossEval out;
  out.value = std::abs(r);
  if (std::abs(r) > kink_tol) {
    out.gradients.push_back(r > 0 ? Vector(x) : Vector(-x));
  } else {
    out.gradients.push_back(x);
    out.gradients.push_back(-x);
  }
  return out;
}

namespace {

// Max-shifted logits for one point; throws on non-finite entries.
Vector logits_of(const Vector& w_flat, int classes, const Vector& x) {
  const auto n = x.size();
  if (w_flat.size() != static_cast<Eigen::Index>(classes) * n)
    throw std::invalid_argument("softmax: weight vector has wrong length for class count");
  Vector z(classes);
  for (int c = 0; c < classes; ++c) z(c) = w_flat.segment(c * n, n).dot(x);
  for (int c = 0; c < classes; ++c)
    if (!std::isfinite(z(c)))
      throw std::runtime_error("softmax: non-finite logit at class index " + std::to_string(c));
  return z;
}

}  // namespace

LossEval softmax_loss_eval(const Vector& w_flat, int classes, const Vector& x, int cls) {
  if (cls < 0 || cls >= classes)
    throw std::invalid_argument("softmax_loss_eval: class index out of range");
  Vector z = logits_of(w_flat, classes, x);
  double zmax = z.maxCoeff();
  Vector ez = (z.array() - zmax).exp();
  double denom = ez.sum();
  Vector p = ez / denom;

  LossEval out;
  out.value = std::log(denom) + zmax - z(cls);  // -log p_c via logsumexp
  Vector g(w_flat.size());
  const auto n = x.size();
  for (int c = 0; c < classes; ++c) {
    double coeff = p(c) - (c == cls ? 1.0 : 0.0);
    g.segment(c * n, n) = coeff * x;
  }
  out.gradients.push_back(std::move(g));
  return out;
}

int predict_class(const Vector& w_flat, int classes, const Vector& x) {
  Vector z = logits_of(w_flat, classes, x);
  int best = 0;
  for (int c = 1; c < classes; ++c)
    if (z(c) > z(best)) best = c;
  return best;
}

Vector LossModel::values(const Vector& w, const Dataset& data,
                         const std::vector<int>& idx) const {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out(j) = value(w, data, idx[j]);
  return out;
}

double AbsoluteLoss::value(const Vector& w, const Dataset& data, int i) const {
  return std::abs(data.X.row(i).dot(w) - data.y(i));
}

LossEval AbsoluteLoss::eval(const Vector& w, const Dataset& data, int i) const {
  double pred = data.X.row(i).dot(w);
  return abs_loss_eval(w, data.X.row(i).transpose(), data.y(i),
                       default_kink_tol(pred, data.y(i)));
}

std::vector<LossBranch> AbsoluteLoss::branches_at(const Vector& w, const Dataset& data,
                                                  int i, const Vector& branch_point) const {
  // Sign manifolds of |r| are the globally linear pieces ±r; the branch is
  // picked by the residual sign at branch_point, and its extension to w is
  // the signed residual there (negative when w sits on the other side).
  Vector x = data.X.row(i).transpose();
  const double r = w.dot(x) - data.y(i);
  const double pred_b = branch_point.dot(x);
  const double rb = pred_b - data.y(i);
  const double tol = default_kink_tol(pred_b, data.y(i));
  std::vector<LossBranch> out;
  if (rb > tol) {
    out.push_back({r, x});
  } else if (rb < -tol) {
    out.push_back({-r, -x});
  } else {
    out.push_back({r, x});
    out.push_back({-r, Vector(-x)});
  }
  return out;
}

Vector AbsoluteLoss::values(const Vector& w, const Dataset& data,
                            const std::vector<int>& idx) const {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j)
    out(j) = std::abs(data.X.row(idx[j]).dot(w) - data.y(idx[j]));
  return out;
}

double SoftmaxLoss::value(const Vector& w, const Dataset& data, int i) const {
  return softmax_loss_eval(w, classes_, data.X.row(i).transpose(), data.label_at(i)).value;
}

LossEval SoftmaxLoss::eval(const Vector& w, const Dataset& data, int i) const {
  return softmax_loss_eval(w, classes_, data.X.row(i).transpose(), data.label_at(i));
}

}  // namespace trimfit
