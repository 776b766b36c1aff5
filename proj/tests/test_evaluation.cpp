#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "trimfit/data_pipeline.hpp"
#include "trimfit/evaluation.hpp"
#include "trimfit/rng.hpp"

using namespace trimfit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("flag_outliers basics") {
  auto m = flag_outliers(vec({1, 2, 3, 4, 5}), 3);
  CHECK(m == std::vector<std::uint8_t>{0, 0, 0, 1, 1});
  auto none = flag_outliers(vec({1, 2, 3}), 3);
  CHECK(none == std::vector<std::uint8_t>{0, 0, 0});
  // Boundary ties: higher index flagged first.
  auto tie = flag_outliers(vec({1, 2, 2, 3}), 2);
  CHECK(tie == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("flag_outliers flags exactly N - q and is monotone-transform invariant") {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    int N = 5 + static_cast<int>(rng.integer(20));
    int q = 1 + static_cast<int>(rng.integer(N));
    Vector losses(N);
    for (int i = 0; i < N; ++i) losses(i) = rng.integer(6);
    auto m = flag_outliers(losses, q);
    int count = 0;
    for (auto b : m) count += b;
    CHECK(count == N - q);
    // Strictly increasing and exact on small integers, so ties are preserved.
    Vector transformed = losses.array() * 3.0 + 1.0;
    CHECK(flag_outliers(transformed, q) == m);
  }
}

TEST_CASE("confusion_rates") {
  std::vector<std::uint8_t> truth(1000, 0), pred(1000, 0);
  for (int i = 0; i < 400; ++i) truth[i] = pred[i] = 1;
  auto r = confusion_rates(pred, truth);
  REQUIRE(r.tpr.has_value());
  CHECK(*r.tpr == doctest::Approx(100.0));
  CHECK(r.fpr == doctest::Approx(0.0));

  std::fill(pred.begin(), pred.end(), 0);
  r = confusion_rates(pred, truth);
  CHECK(*r.tpr == doctest::Approx(0.0));
  CHECK(r.fpr == doctest::Approx(0.0));

  std::fill(truth.begin(), truth.end(), 0);
  for (int i = 0; i < 100; ++i) pred[i] = 1;
  r = confusion_rates(pred, truth);
  CHECK_FALSE(r.tpr.has_value());  // no true outliers: TPR undefined
  CHECK(r.fpr == doctest::Approx(10.0));

  CHECK_THROWS_AS(confusion_rates({1, 0}, {1}), std::invalid_argument);
}

TEST_CASE("test_accuracy: zero weights on balanced labels predict class 0") {
  Dataset d;
  d.classification = true;
  int N = 100;
  d.X = Matrix::Ones(N, 5);
  d.y.resize(N);
  for (int i = 0; i < N; ++i) d.y(i) = i % 10;
  Vector w = Vector::Zero(50);
  double acc = test_accuracy(w, 10, d);
  CHECK(acc == doctest::Approx(10.0));
  // accuracy + error = 100 exactly.
  CHECK(acc + (100.0 - acc) == 100.0);
}

TEST_CASE("test_accuracy: oracle weights on separable data reach 100") {
  Dataset d;
  d.classification = true;
  int N = 30;
  d.X = Matrix::Zero(N, 11);
  d.y.resize(N);
  for (int i = 0; i < N; ++i) {
    int c = i % 10;
    d.X(i, c) = 1.0;
    d.X(i, 10) = 1.0;
    d.y(i) = c;
  }
  Vector w = Vector::Zero(10 * 11);
  for (int c = 0; c < 10; ++c) w(c * 11 + c) = 5.0;  // logit c fires on feature c
  CHECK(test_accuracy(w, 10, d) == doctest::Approx(100.0));
}

TEST_CASE("refit_inliers converges on zero-noise inliers") {
  Rng rng(5);
  int d = 2, N = 60;
  Dataset data;
  data.X.resize(N, d);
  data.y.resize(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < d; ++j) data.X(i, j) = 10.0 * rng.normal();
    data.y(i) = data.X.row(i).sum();  // exact generator e, zero noise
  }
  // Poison some rows, mark them as outliers.
  std::vector<std::uint8_t> inlier(N, 1);
  for (int i = 0; i < 10; ++i) {
    data.y(i) += 500.0;
    inlier[i] = 0;
  }
  Vector w0 = Vector::Ones(d) * 1.3;
  std::vector<double> trace;
  Vector w = refit_inliers(data, inlier, 30000, w0, &trace);
  CHECK((w - Vector::Ones(d)).cwiseAbs().maxCoeff() <= 1e-2);
  // Monotone non-increase of the tracked best objective.
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
}

TEST_CASE("refit_inliers: budget 0 returns the input weights") {
  Dataset data = generate_regression(3, 20, 6);
  std::vector<std::uint8_t> inlier(20, 1);
  Vector w0 = Vector::Ones(3) * 0.4;
  Vector w = refit_inliers(data, inlier, 0, w0);
  CHECK((w - w0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("refit_inliers: underdetermined inlier set throws") {
  Dataset data = generate_regression(5, 20, 7);
  std::vector<std::uint8_t> inlier(20, 0);
  inlier[0] = inlier[1] = 1;  // 2 < d = 5
  CHECK_THROWS_AS(refit_inliers(data, inlier, 10, Vector::Zero(5)),
                  std::invalid_argument);
}
