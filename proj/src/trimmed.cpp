#include "trimfit/trimmed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace trimfit {

namespace {

void check_q(const Vector& losses, int q) {
  const int n = static_cast<int>(losses.size());
  if (q < 1 || q > n) throw std::invalid_argument("trimmed objective: q out of range [1, N]");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(losses(i)))
      throw std::invalid_argument("trimmed objective: non-finite loss entry");
}

// Indices sorted by (loss, index); stable across platforms.
std::vector<int> sorted_indices(const Vector& losses) {
  std::vector<int> idx(losses.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return losses(a) < losses(b); });
  return idx;
}

}  // namespace

double trimmed_value(const Vector& losses, int q) {
  check_q(losses, q);
  std::vector<int> idx = sorted_indices(losses);
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += losses(idx[j]);
  return s / q;
}

double default_tie_tol(const Vector& losses, int q) {
  check_q(losses, q);
  std::vector<int> idx = sorted_indices(losses);
  return 1e-8 * (1.0 + std::abs(losses(idx[q - 1])));
}

ActiveTupleSet active_tuples(const Vector& losses, int q, double tie_tol) {
  check_q(losses, q);
  if (tie_tol < 0.0) throw std::invalid_argument("active_tuples: tie_tol must be >= 0");
  std::vector<int> idx = sorted_indices(losses);
  ActiveTupleSet act;
  act.q = q;
  act.tie_tol = tie_tol;
  act.threshold = losses(idx[q - 1]);
  const int n = static_cast<int>(losses.size());
  for (int i = 0; i < n; ++i) {
    if (losses(i) < act.threshold - tie_tol)
      act.below.push_back(i);
    else if (std::abs(losses(i) - act.threshold) <= tie_tol)
      act.boundary.push_back(i);
  }
  act.slots = q - static_cast<int>(act.below.size());
  return act;
}

double selection_value(const std::vector<int>& tuple, const Vector& losses, int q) {
  if (static_cast<int>(tuple.size()) != q)
    throw std::invalid_argument("selection_value: tuple size must equal q");
  std::unordered_set<int> seen;
  double s = 0.0;
  for (int i : tuple) {
    if (i < 0 || i >= losses.size())
      throw std::invalid_argument("selection_value: index out of range");
    if (!seen.insert(i).second)
      throw std::invalid_argument("selection_value: duplicate index in tuple");
    s += losses(i);
  }
  return s / q;
}

std::vector<std::vector<int>> enumerate_tuples(const ActiveTupleSet& act, int cap,
                                               bool* truncated) {
  if (cap < 1) throw std::invalid_argument("enumerate_tuples: cap must be >= 1");
  if (truncated) *truncated = false;
  std::vector<std::vector<int>> out;
  const int b = static_cast<int>(act.boundary.size());
  const int s = act.slots;
  if (s < 0 || s > b) throw std::invalid_argument("enumerate_tuples: inconsistent tuple set");

  // Combination counter over boundary positions, lexicographic.
  std::vector<int> comb(s);
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    std::vector<int> tuple = act.below;
    for (int j : comb) tuple.push_back(act.boundary[j]);
    std::sort(tuple.begin(), tuple.end());
    out.push_back(std::move(tuple));
    if (static_cast<int>(out.size()) >= cap) {
      // More combinations left?
      int i = s - 1;
      while (i >= 0 && comb[i] == b - s + i) --i;
      if (i >= 0 && truncated) *truncated = true;
      return out;
    }
    if (s == 0) break;
    int i = s - 1;
    while (i >= 0 && comb[i] == b - s + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

GeneratorSet build_branch_generators(const std::vector<std::vector<int>>& tuples,
                                     double h, int q,
                                     const BranchProvider& branches, int cap) {
  if (cap < 1) throw std::invalid_argument("build_branch_generators: cap must be >= 1");
  GeneratorSet out;

  for (const auto& tuple : tuples) {
    std::vector<std::vector<LossBranch>> local;
    local.reserve(tuple.size());
    for (int i : tuple) {
      auto b = branches(i);
      if (b.empty())
        throw std::invalid_argument("build_branch_generators: empty branch set");
      local.push_back(std::move(b));
    }

    // Odometer over per-index branch choices; all-first-branch combination
    // comes out first.
    std::vector<std::size_t> choice(tuple.size(), 0);
    for (;;) {
      Vector g = Vector::Zero(local[0][0].gradient.size());
      double v = 0.0;
      for (std::size_t j = 0; j < tuple.size(); ++j) {
        g += local[j][choice[j]].gradient;
        v += local[j][choice[j]].value;
      }
      g /= static_cast<double>(q);
      const double offset = v / static_cast<double>(q) - h;

      // Same gradient twice: keep the larger offset (the pieces' pointwise
      // max), which is what the subproblem's max model sees anyway.
      bool dup = false;
      for (auto& existing : out.items) {
        if ((existing.gradient - g).cwiseAbs().maxCoeff() <= 1e-12) {
          existing.offset = std::max(existing.offset, offset);
          dup = true;
          break;
        }
      }
      if (!dup) {
        out.items.push_back({std::move(g), offset, tuple});
        if (static_cast<int>(out.items.size()) >= cap) {
          std::size_t j = choice.size();
          while (j > 0 && choice[j - 1] + 1 == local[j - 1].size()) --j;
          out.truncated = (j > 0) || (&tuple != &tuples.back());
          return out;
        }
      }

      std::size_t j = choice.size();
      while (j > 0) {
        if (++choice[j - 1] < local[j - 1].size()) break;
        choice[j - 1] = 0;
        --j;
      }
      if (j == 0) break;
    }
  }
  return out;
}

GeneratorSet build_generators(const std::vector<std::vector<int>>& tuples,
                              const Vector& offset_losses, int q,
                              const GradProvider& grads, int cap) {
  if (cap < 1) throw std::invalid_argument("build_generators: cap must be >= 1");
  GeneratorSet out;
  const double h = trimmed_value(offset_losses, q);

  for (const auto& tuple : tuples) {
    std::vector<std::vector<Vector>> local;
    local.reserve(tuple.size());
    for (int i : tuple) {
      auto g = grads(i);
      if (g.empty()) throw std::invalid_argument("build_generators: empty gradient set");
      local.push_back(std::move(g));
    }
    const double offset = selection_value(tuple, offset_losses, q) - h;

    // Odometer over per-index branch choices; all-first-branch combination
    // comes out first.
    std::vector<std::size_t> choice(tuple.size(), 0);
    for (;;) {
      Vector g = Vector::Zero(local[0][0].size());
      for (std::size_t j = 0; j < tuple.size(); ++j) g += local[j][choice[j]];
      g /= static_cast<double>(q);

      bool dup = false;
      for (const auto& existing : out.items) {
        if ((existing.gradient - g).cwiseAbs().maxCoeff() <= 1e-12) {
          dup = true;
          break;
        }
      }
      if (!dup) {
        out.items.push_back({std::move(g), offset, tuple});
        if (static_cast<int>(out.items.size()) >= cap) {
          // Truncated iff anything remains unenumerated.
          std::size_t j = choice.size();
          while (j > 0 && choice[j - 1] + 1 == local[j - 1].size()) --j;
          out.truncated = (j > 0) || (&tuple != &tuples.back());
          return out;
        }
      }

      std::size_t j = choice.size();
      while (j > 0) {
        if (++choice[j - 1] < local[j - 1].size()) break;
        choice[j - 1] = 0;
        --j;
      }
      if (j == 0) break;
    }
  }
  return out;
}

GeneratorSet selection_gradients(const ActiveTupleSet& act, const Vector& losses,
                                 int q, const GradProvider& grads, int cap) {
  bool trunc = false;
  auto tuples = enumerate_tuples(act, cap, &trunc);
  GeneratorSet out = build_generators(tuples, losses, q, grads, cap);
  out.truncated = out.truncated || trunc;
  return out;
}

std::vector<int> lexicographic_tuple(const Vector& losses, int q) {
  check_q(losses, q);
  std::vector<int> idx = sorted_indices(losses);
  idx.resize(q);
  return idx;
}

}  // namespace trimfit
