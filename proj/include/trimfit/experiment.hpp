#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trimfit/data_pipeline.hpp"
#include "trimfit/manifold.hpp"
#include "trimfit/ssgd.hpp"

namespace trimfit {

enum class ExperimentKind { regression_grid, mnist_study, ssgd_tuning, sms_tuning, single_run };
enum class Method { DMS, SMS, SSGD, SGD_untrimmed };

std::string method_name(Method m);

/// Thrown on invalid specs and missing data files, before any run starts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::regression_grid;
  std::vector<Method> methods{Method::DMS, Method::SMS};
  int trials = 30;
  std::uint64_t base_seed = 0;

  // Regression grid.
  std::vector<int> dims{5, 10, 20};
  std::vector<int> sizes{500, 2000};
  double trim_ratio = 0.6;  // q = floor(trim_ratio * N)

  // Classification study.
  std::vector<double> contamination{0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<double> margins{0.05, 0.10};  // q = floor((1 - p - margin) * N)
  std::string train_images, train_labels, test_images, test_labels;
  int n_train = 2000, n_test = 1000;
  int class_epochs = 40;

  // Solver knobs shared across kinds.
  double delta0 = 10.0, gamma_inc = 1.01, gamma_dec = 0.99, eta = 1e-3;
  double dms_delta_min = 0.01;
  int sms_epochs = 100;
  double ssgd_alpha = 0.1;
  double ssgd_decay = 0.0;
  int ssgd_batch = 40;
  int ssgd_epochs = 100;

  // Tuning grids.
  std::vector<double> tuning_alphas{10.0, 1.0, 0.1, 0.01, 0.001};
  std::vector<int> tuning_batches{600, 40, 16};
  std::vector<double> tuning_betas{2.0, 1.5, 1.33, 1.1, 1.01};
  std::vector<double> tuning_deltas0{10.0, 1.0};
  double tuning_p = 0.3;
  double tuning_margin = 0.05;

  // Single run.
  Method single_method = Method::DMS;
  int single_d = 5, single_N = 500;
  bool single_contaminate = true;

  std::string out_path = "report.csv";
  std::string format = "csv";  // csv | json
  int threads = 1;
};

struct ResultRow {
  std::string method;
  int d = 0, N = 0;
  double p = 0.0;
  int q = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> tpr;
  double fpr = 0.0;
  std::optional<double> accuracy;
  double time_s = 0.0;
  int iters = 0;
  double final_obj = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Parses and lints a spec document; throws ConfigError on problems.
ExperimentSpec parse_experiment_spec(const std::string& toml_path);

/// Executes every (configuration x trial) cell of the spec. Trials dispatch
/// to a bounded worker pool; the row order is independent of thread count.
/// If last_report is given, the final cell's full RunReport is copied there
/// (used by the CLI's single_run output).
ResultTable run_experiment(const ExperimentSpec& spec, RunReport* last_report = nullptr);

/// CSV (fixed column order) or JSON ("trimfit-report/1"), plus a 25/50/75
/// percentile summary block grouped by configuration.
void emit_report(const ResultTable& table, const std::string& format,
                 const std::string& path);

std::string render_csv(const ResultTable& table);
nlohmann::json render_json(const ResultTable& table);

/// Linear-interpolation percentile (R-7); pct in [0, 100].
double percentile(std::vector<double> values, double pct);

/// Writes a synthetic 28x28 digit-image corpus in IDX format: ten blob
/// prototypes plus per-pixel noise. Stand-in classification data for offline
/// desk-scale studies.
void synthesize_digit_idx(const std::string& images_path, const std::string& labels_path,
                          int count, std::uint64_t seed, double noise = 0.35);

}  // namespace trimfit
