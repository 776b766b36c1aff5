#pragma once

#include <functional>
#include <vector>

#include "trimfit/dataset.hpp"
#include "trimfit/losses.hpp"

namespace trimfit {

/// Compact representation of the active q-tuple family at a loss vector:
/// indices strictly below the q-th order statistic, the tied boundary pool,
/// and the number of boundary slots each tuple fills.
struct ActiveTupleSet {
  std::vector<int> below;
  std::vector<int> boundary;
  int slots = 0;
  double threshold = 0.0;
  double tie_tol = 0.0;
  int q = 0;
};

/// One generator for the trust-region subproblem: a selection-function
/// gradient plus its offset b_a = g^a(l(w)) - h(l(w)).
struct SelectionGradient {
  Vector gradient;
  double offset = 0.0;
  std::vector<int> tuple;  // canonical sorted index tuple
};

struct GeneratorSet {
  std::vector<SelectionGradient> items;
  bool truncated = false;
};

/// Supplies the local-gradient set of loss i at the current weights.
using GradProvider = std::function<std::vector<Vector>(int)>;

/// Mean of the q smallest losses.
double trimmed_value(const Vector& losses, int q);

/// Relative tie tolerance 1e-8 * (1 + |threshold|) for the given losses.
double default_tie_tol(const Vector& losses, int q);

ActiveTupleSet active_tuples(const Vector& losses, int q, double tie_tol);

/// (1/q) * sum of losses over the tuple; indices must be distinct.
double selection_value(const std::vector<int>& tuple, const Vector& losses, int q);

/// Deterministic lexicographic enumeration of the tuples implied by an
/// ActiveTupleSet: below ∪ (slots-subset of boundary), subsets in
/// combination order. Stops at cap tuples and sets *truncated.
std::vector<std::vector<int>> enumerate_tuples(const ActiveTupleSet& act, int cap,
                                               bool* truncated = nullptr);

/// Builds selection gradients for explicit tuples: per tuple, every
/// combination of local-gradient choices at kinks (first branch varied last),
/// capped at cap generators total; duplicates within 1e-12 componentwise are
/// merged. Offsets come from offset_losses.
GeneratorSet build_generators(const std::vector<std::vector<int>>& tuples,
                              const Vector& offset_losses, int q,
                              const GradProvider& grads, int cap);

/// Supplies the smooth branches of loss i relevant to a probe point.
using BranchProvider = std::function<std::vector<LossBranch>(int)>;

/// Branch-aware variant: per tuple, every combination of branch choices,
/// with gradient the mean branch gradient and offset the mean extended
/// branch value minus h (exact for piecewise-linear losses; may be < 0 on
/// pieces lying below the loss at the query point).
GeneratorSet build_branch_generators(const std::vector<std::vector<int>>& tuples,
                                     double h, int q,
                                     const BranchProvider& branches, int cap);

/// Generators for all tuples active at the given losses.
GeneratorSet selection_gradients(const ActiveTupleSet& act, const Vector& losses,
                                 int q, const GradProvider& grads, int cap);

/// The q indices smallest under ordering by (loss value, index).
std::vector<int> lexicographic_tuple(const Vector& losses, int q);

}  // namespace trimfit
