#include "trimfit/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "trimfit/evaluation.hpp"
#include "trimfit/rng.hpp"
#include "trimfit/toml_lite.hpp"

namespace trimfit {

std::string method_name(Method m) {
  switch (m) {
    case Method::DMS: return "DMS";
    case Method::SMS: return "SMS";
    case Method::SSGD: return "SSGD";
    case Method::SGD_untrimmed: return "SGD";
  }
  return "?";
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  std::sort(values.begin(), values.end());
  double h = (values.size() - 1) * pct / 100.0;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = h - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

namespace {

Method method_from_string(const std::string& s) {
  if (s == "DMS") return Method::DMS;
  if (s == "SMS") return Method::SMS;
  if (s == "SSGD") return Method::SSGD;
  if (s == "SGD" || s == "SGD_untrimmed") return Method::SGD_untrimmed;
  throw ConfigError("unknown method '" + s + "'");
}

ExperimentKind kind_from_string(const std::string& s) {
  if (s == "regression_grid") return ExperimentKind::regression_grid;
  if (s == "mnist_study") return ExperimentKind::mnist_study;
  if (s == "ssgd_tuning") return ExperimentKind::ssgd_tuning;
  if (s == "sms_tuning") return ExperimentKind::sms_tuning;
  if (s == "single_run") return ExperimentKind::single_run;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(base).split(a).split(b).seed();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec parsing

ExperimentSpec parse_experiment_spec(const std::string& toml_path) {
  toml::Document doc;
  try {
    doc = toml::parse_file(toml_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  ExperimentSpec spec;
  try {
    auto root = doc.count("") ? doc.at("") : toml::Table{};
    auto get = [](const toml::Table& t, const std::string& k) -> const toml::Value* {
      auto it = t.find(k);
      return it == t.end() ? nullptr : &it->second;
    };
    if (auto* v = get(root, "kind")) spec.kind = kind_from_string(v->as_string());
    else throw ConfigError("spec missing required key 'kind'");
    if (auto* v = get(root, "methods")) {
      spec.methods.clear();
      for (const auto& item : v->as_array())
        spec.methods.push_back(method_from_string(item.as_string()));
    }
    if (auto* v = get(root, "trials")) spec.trials = static_cast<int>(v->as_int());
    if (auto* v = get(root, "seed")) spec.base_seed = static_cast<std::uint64_t>(v->as_int());
    if (auto* v = get(root, "out")) spec.out_path = v->as_string();
    if (auto* v = get(root, "format")) spec.format = v->as_string();
    if (auto* v = get(root, "threads")) spec.threads = static_cast<int>(v->as_int());

    if (doc.count("regression")) {
      const auto& t = doc.at("regression");
      if (auto* v = get(t, "dims")) {
        spec.dims.clear();
        for (const auto& x : v->as_array()) spec.dims.push_back(static_cast<int>(x.as_int()));
      }
      if (auto* v = get(t, "sizes")) {
        spec.sizes.clear();
        for (const auto& x : v->as_array()) spec.sizes.push_back(static_cast<int>(x.as_int()));
      }
      if (auto* v = get(t, "trim_ratio")) spec.trim_ratio = v->as_double();
    }
    if (doc.count("mnist")) {
      const auto& t = doc.at("mnist");
      if (auto* v = get(t, "train_images")) spec.train_images = v->as_string();
      if (auto* v = get(t, "train_labels")) spec.train_labels = v->as_string();
      if (auto* v = get(t, "test_images")) spec.test_images = v->as_string();
      if (auto* v = get(t, "test_labels")) spec.test_labels = v->as_string();
      if (auto* v = get(t, "contamination")) {
        spec.contamination.clear();
        for (const auto& x : v->as_array()) spec.contamination.push_back(x.as_double());
      }
      if (auto* v = get(t, "margins")) {
        spec.margins.clear();
        for (const auto& x : v->as_array()) spec.margins.push_back(x.as_double());
      }
      if (auto* v = get(t, "n_train")) spec.n_train = static_cast<int>(v->as_int());
      if (auto* v = get(t, "n_test")) spec.n_test = static_cast<int>(v->as_int());
      if (auto* v = get(t, "epochs")) spec.class_epochs = static_cast<int>(v->as_int());
    }
    if (doc.count("solver")) {
      const auto& t = doc.at("solver");
      if (auto* v = get(t, "delta0")) spec.delta0 = v->as_double();
      if (auto* v = get(t, "gamma_inc")) spec.gamma_inc = v->as_double();
      if (auto* v = get(t, "gamma_dec")) spec.gamma_dec = v->as_double();
      if (auto* v = get(t, "eta")) spec.eta = v->as_double();
      if (auto* v = get(t, "dms_delta_min")) spec.dms_delta_min = v->as_double();
      if (auto* v = get(t, "sms_epochs")) spec.sms_epochs = static_cast<int>(v->as_int());
    }
    if (doc.count("ssgd")) {
      const auto& t = doc.at("ssgd");
      if (auto* v = get(t, "alpha")) spec.ssgd_alpha = v->as_double();
      if (auto* v = get(t, "decay")) spec.ssgd_decay = v->as_double();
      if (auto* v = get(t, "batch")) spec.ssgd_batch = static_cast<int>(v->as_int());
      if (auto* v = get(t, "epochs")) spec.ssgd_epochs = static_cast<int>(v->as_int());
    }
    if (doc.count("tuning")) {
      const auto& t = doc.at("tuning");
      if (auto* v = get(t, "alphas")) {
        spec.tuning_alphas.clear();
        for (const auto& x : v->as_array()) spec.tuning_alphas.push_back(x.as_double());
      }
      if (auto* v = get(t, "batches")) {
        spec.tuning_batches.clear();
        for (const auto& x : v->as_array())
          spec.tuning_batches.push_back(static_cast<int>(x.as_int()));
      }
      if (auto* v = get(t, "betas")) {
        spec.tuning_betas.clear();
        for (const auto& x : v->as_array()) spec.tuning_betas.push_back(x.as_double());
      }
      if (auto* v = get(t, "deltas0")) {
        spec.tuning_deltas0.clear();
        for (const auto& x : v->as_array()) spec.tuning_deltas0.push_back(x.as_double());
      }
      if (auto* v = get(t, "p")) spec.tuning_p = v->as_double();
      if (auto* v = get(t, "margin")) spec.tuning_margin = v->as_double();
    }
    if (doc.count("single")) {
      const auto& t = doc.at("single");
      if (auto* v = get(t, "method")) spec.single_method = method_from_string(v->as_string());
      if (auto* v = get(t, "d")) spec.single_d = static_cast<int>(v->as_int());
      if (auto* v = get(t, "N")) spec.single_N = static_cast<int>(v->as_int());
      if (auto* v = get(t, "contaminate")) spec.single_contaminate = v->as_bool();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid spec: ") + e.what());
  }

  // Lint before any run starts.
  if (spec.trials < 1) throw ConfigError("trials must be >= 1");
  if (spec.format != "csv" && spec.format != "json")
    throw ConfigError("format must be 'csv' or 'json'");
  if (spec.threads < 1) throw ConfigError("threads must be >= 1");
  if (spec.trim_ratio <= 0.0 || spec.trim_ratio > 1.0)
    throw ConfigError("trim_ratio must be in (0, 1]");
  bool wants_class = spec.kind == ExperimentKind::mnist_study ||
                     spec.kind == ExperimentKind::ssgd_tuning ||
                     spec.kind == ExperimentKind::sms_tuning;
  if (wants_class) {
    for (const std::string* p : {&spec.train_images, &spec.train_labels,
                                 &spec.test_images, &spec.test_labels}) {
      if (p->empty()) throw ConfigError("classification study requires IDX file paths");
      std::ifstream probe(*p, std::ios::binary);
      if (!probe) throw ConfigError("data file not found: " + *p);
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Cell execution

namespace {

struct CellResult {
  ResultRow row;
  RunReport report;
};

SolverConfig ms_config(const ExperimentSpec& spec, bool deterministic,
                       SampleMode schedule, double trim_fraction,
                       std::uint64_t seed, int epochs) {
  SolverConfig cfg;
  cfg.gamma_inc = spec.gamma_inc;
  cfg.gamma_dec = spec.gamma_dec;
  cfg.eta = spec.eta;
  cfg.delta0 = spec.delta0;
  cfg.deterministic = deterministic;
  cfg.schedule = schedule;
  cfg.delta_min = spec.dms_delta_min;
  cfg.epoch_budget = epochs;
  cfg.trim_fraction = trim_fraction;
  cfg.seed = seed;
  return cfg;
}

CellResult regression_cell(const ExperimentSpec& spec, Method method, int d, int N,
                           int trial) {
  const std::uint64_t run_seed = spec.base_seed + static_cast<std::uint64_t>(trial);
  // The dataset depends on (d, N, trial) only, so every method sees the same
  // 30 generated sets.
  const std::uint64_t data_key = static_cast<std::uint64_t>(d) * 1000003u +
                                 static_cast<std::uint64_t>(N);
  const std::uint64_t gen_seed = derive_seed(run_seed, 1, data_key);
  const std::uint64_t cont_seed = derive_seed(run_seed, 2, data_key);
  const std::uint64_t solver_seed = derive_seed(run_seed, 3, static_cast<int>(method));

  Dataset data = contaminate_regression(generate_regression(d, N, gen_seed), cont_seed);
  AbsoluteLoss loss;
  const int q = static_cast<int>(std::floor(spec.trim_ratio * N));
  const double tf = static_cast<double>(q) / N;

  CellResult cell;
  switch (method) {
    case Method::DMS:
      cell.report = run_ms(ms_config(spec, true, SampleMode::deterministic, tf,
                                     solver_seed, 0),
                           data, loss);
      break;
    case Method::SMS:
      cell.report = run_ms(ms_config(spec, false, SampleMode::regression, tf,
                                     solver_seed, spec.sms_epochs),
                           data, loss);
      break;
    case Method::SSGD:
    case Method::SGD_untrimmed: {
      SSGDConfig cfg;
      cfg.alpha = spec.ssgd_alpha;
      cfg.delta_decay = spec.ssgd_decay;
      cfg.batch = spec.ssgd_batch;
      cfg.trim_fraction = method == Method::SSGD ? tf : 1.0;
      cfg.epoch_budget = spec.ssgd_epochs;
      cfg.seed = solver_seed;
      cell.report = run_ssgd(cfg, data, loss);
      break;
    }
  }

  std::vector<int> all_idx(N);
  std::iota(all_idx.begin(), all_idx.end(), 0);
  Vector losses = loss.values(cell.report.final_w, data, all_idx);
  auto predicted = flag_outliers(losses, q);
  auto rates = confusion_rates(predicted, *data.outlier_mask);

  ResultRow& row = cell.row;
  row.method = method_name(method);
  row.d = d;
  row.N = N;
  row.p = 0.4;
  row.q = q;
  row.trial = trial;
  row.seed = run_seed;
  row.tpr = rates.tpr;
  row.fpr = rates.fpr;
  row.time_s = cell.report.wall_s;
  row.iters = static_cast<int>(cell.report.trace.size());
  row.final_obj = cell.report.final_objective;
  return cell;
}

struct ClassData {
  Dataset train;  // clean; flips applied per cell
  Dataset test;
};

ClassData load_class_data(const ExperimentSpec& spec) {
  ClassData cd;
  Dataset train_full =
      featurize_mnist(read_idx(spec.train_images), read_idx(spec.train_labels));
  Dataset test_full =
      featurize_mnist(read_idx(spec.test_images), read_idx(spec.test_labels));
  if (train_full.size() < spec.n_train || test_full.size() < spec.n_test)
    throw ConfigError("classification data smaller than requested subset");

  // Seeded subset selection keeps desk-scale runs reproducible.
  auto subset = [&](const Dataset& src, int n, std::uint64_t stream) {
    Rng rng(derive_seed(spec.base_seed, 4, stream));
    std::vector<int> pick = rng.sample_without_replacement(src.size(), n);
    std::sort(pick.begin(), pick.end());
    Dataset out;
    out.classification = true;
    out.X.resize(n, src.dim());
    out.y.resize(n);
    for (int i = 0; i < n; ++i) {
      out.X.row(i) = src.X.row(pick[i]);
      out.y(i) = src.y(pick[i]);
    }
    out.outlier_mask = std::vector<std::uint8_t>(n, 0);
    out.provenance = src.provenance;
    return out;
  };
  cd.train = subset(train_full, spec.n_train, 0);
  cd.test = subset(test_full, spec.n_test, 1);
  return cd;
}

CellResult classification_cell(const ExperimentSpec& spec, const ClassData& cd,
                               Method method, double p, double margin, int trial,
                               const std::string& method_label,
                               double alpha_override, int batch_override,
                               double beta_override, double delta0_override) {
  const std::uint64_t run_seed = spec.base_seed + static_cast<std::uint64_t>(trial);
  const std::uint64_t flip_seed =
      derive_seed(run_seed, 5, static_cast<std::uint64_t>(p * 1000 + margin * 1e6));
  const std::uint64_t solver_seed = derive_seed(run_seed, 6, static_cast<int>(method));

  const int N = cd.train.size();
  Dataset train = p > 0.0 ? flip_labels(cd.train, p, flip_seed) : cd.train;
  const int q = static_cast<int>(std::floor((1.0 - p - margin) * N));
  const double tf = static_cast<double>(q) / N;
  SoftmaxLoss loss(10);

  CellResult cell;
  if (method == Method::SMS) {
    SolverConfig cfg = ms_config(spec, false, SampleMode::mnist, tf, solver_seed,
                                 spec.class_epochs);
    if (beta_override > 0.0) {
      cfg.gamma_inc = beta_override;
      cfg.gamma_dec = 1.0 / beta_override;
    }
    if (batch_override > 0) cfg.batch_override = batch_override;
    if (delta0_override > 0.0) cfg.delta0 = delta0_override;
    cell.report = run_ms(cfg, train, loss);
  } else {
    SSGDConfig cfg;
    cfg.alpha = alpha_override > 0.0 ? alpha_override : spec.ssgd_alpha;
    cfg.delta_decay = spec.ssgd_decay;
    cfg.batch = batch_override > 0 ? batch_override : spec.ssgd_batch;
    cfg.trim_fraction = method == Method::SGD_untrimmed ? 1.0 : tf;
    cfg.epoch_budget = spec.class_epochs;
    cfg.seed = solver_seed;
    cell.report = run_ssgd(cfg, train, loss);
  }

  std::vector<int> all_idx(N);
  std::iota(all_idx.begin(), all_idx.end(), 0);
  Vector losses = loss.values(cell.report.final_w, train, all_idx);
  auto predicted = flag_outliers(losses, q);
  auto rates = confusion_rates(predicted, *train.outlier_mask);

  ResultRow& row = cell.row;
  row.method = method_label.empty() ? method_name(method) : method_label;
  row.d = cd.train.dim();
  row.N = N;
  row.p = p;
  row.q = q;
  row.trial = trial;
  row.seed = run_seed;
  row.tpr = rates.tpr;
  row.fpr = rates.fpr;
  row.accuracy = test_accuracy(cell.report.final_w, 10, cd.test);
  row.time_s = cell.report.wall_s;
  row.iters = static_cast<int>(cell.report.trace.size());
  row.final_obj = cell.report.final_objective;
  return cell;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, RunReport* last_report) {
  std::vector<std::function<CellResult()>> cells;
  ClassData cd;
  bool wants_class = spec.kind == ExperimentKind::mnist_study ||
                     spec.kind == ExperimentKind::ssgd_tuning ||
                     spec.kind == ExperimentKind::sms_tuning;
  if (wants_class) cd = load_class_data(spec);

  switch (spec.kind) {
    case ExperimentKind::regression_grid:
      for (Method m : spec.methods)
        for (int d : spec.dims)
          for (int N : spec.sizes)
            for (int t = 0; t < spec.trials; ++t)
              cells.push_back([&spec, m, d, N, t] {
                return regression_cell(spec, m, d, N, t);
              });
      break;
    case ExperimentKind::mnist_study:
      for (Method m : spec.methods)
        for (double margin : spec.margins)
          for (double p : spec.contamination)
            for (int t = 0; t < spec.trials; ++t)
              cells.push_back([&spec, &cd, m, margin, p, t] {
                return classification_cell(spec, cd, m, p, margin, t, "", 0, 0, 0, 0);
              });
      break;
    case ExperimentKind::ssgd_tuning:
      for (double a : spec.tuning_alphas)
        for (int s : spec.tuning_batches)
          for (int t = 0; t < spec.trials; ++t)
            cells.push_back([&spec, &cd, a, s, t] {
              std::string label = "SSGD[a=" + fmt_short(a) + ",s=" + std::to_string(s) + "]";
              return classification_cell(spec, cd, Method::SSGD, spec.tuning_p,
                                         spec.tuning_margin, t, label, a, s, 0, 0);
            });
      break;
    case ExperimentKind::sms_tuning:
      for (double beta : spec.tuning_betas)
        for (int s : spec.tuning_batches)
          for (double d0 : spec.tuning_deltas0)
            for (int t = 0; t < spec.trials; ++t)
              cells.push_back([&spec, &cd, beta, s, d0, t] {
                std::string label = "SMS[b=" + fmt_short(beta) + ",s=" +
                                    std::to_string(s) + ",D0=" + fmt_short(d0) + "]";
                return classification_cell(spec, cd, Method::SMS, spec.tuning_p,
                                           spec.tuning_margin, t, label, 0, s, beta, d0);
              });
      break;
    case ExperimentKind::single_run:
      for (int t = 0; t < spec.trials; ++t)
        cells.push_back([&spec, t] {
          return regression_cell(spec, spec.single_method, spec.single_d,
                                 spec.single_N, t);
        });
      break;
  }

  std::vector<CellResult> results(cells.size());
  const int workers = std::min<int>(spec.threads, static_cast<int>(cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = cells[i]();
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mu;
    for (int wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= cells.size() || failed.load()) return;
          try {
            results[i] = cells[i]();
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mu);
            error_msg = e.what();
            failed.store(true);
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) throw std::runtime_error("run_experiment: " + error_msg);
  }

  ResultTable table;
  table.rows.reserve(results.size());
  for (auto& cr : results) table.rows.push_back(std::move(cr.row));
  if (last_report && !results.empty()) *last_report = std::move(results.back().report);
  return table;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

struct GroupKey {
  std::string method;
  int d, N, q;
  double p;
  bool operator<(const GroupKey& o) const {
    return std::tie(method, d, N, p, q) < std::tie(o.method, o.d, o.N, o.p, o.q);
  }
};

}  // namespace

std::string render_csv(const ResultTable& table) {
  std::ostringstream out;
  out << "method,d,N,p,q,trial,seed,tpr,fpr,accuracy,time_s,iters,final_obj\n";
  for (const auto& r : table.rows) {
    out << r.method << ',' << r.d << ',' << r.N << ',' << fmt_short(r.p) << ',' << r.q
        << ',' << r.trial << ',' << r.seed << ',' << opt_str(r.tpr) << ','
        << fmt_double(r.fpr) << ',' << opt_str(r.accuracy) << ',' << fmt_double(r.time_s)
        << ',' << r.iters << ',' << fmt_double(r.final_obj) << '\n';
  }

  // Percentile summary, one block per configuration.
  std::map<GroupKey, std::vector<const ResultRow*>> groups;
  for (const auto& r : table.rows)
    groups[{r.method, r.d, r.N, r.q, r.p}].push_back(&r);
  out << "\n# summary: 25th/50th/75th percentiles over trials\n";
  out << "method,d,N,p,q,stat,tpr,fpr,accuracy\n";
  for (const auto& [key, rows] : groups) {
    std::vector<double> tprs, fprs, accs;
    for (const auto* r : rows) {
      if (r->tpr) tprs.push_back(*r->tpr);
      fprs.push_back(r->fpr);
      if (r->accuracy) accs.push_back(*r->accuracy);
    }
    for (double pct : {25.0, 50.0, 75.0}) {
      out << key.method << ',' << key.d << ',' << key.N << ',' << fmt_short(key.p) << ','
          << key.q << ",p" << fmt_short(pct) << ','
          << (tprs.empty() ? std::string() : fmt_double(percentile(tprs, pct))) << ','
          << fmt_double(percentile(fprs, pct)) << ','
          << (accs.empty() ? std::string() : fmt_double(percentile(accs, pct))) << '\n';
    }
  }
  return out.str();
}

nlohmann::json render_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json jr{{"method", r.method}, {"d", r.d},         {"N", r.N},
                      {"p", r.p},           {"q", r.q},         {"trial", r.trial},
                      {"seed", r.seed},     {"fpr", r.fpr},     {"time_s", r.time_s},
                      {"iters", r.iters},   {"final_obj", r.final_obj}};
    jr["tpr"] = r.tpr ? nlohmann::json(*r.tpr) : nlohmann::json(nullptr);
    jr["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
    rows.push_back(std::move(jr));
  }

  std::map<GroupKey, std::vector<const ResultRow*>> groups;
  for (const auto& r : table.rows)
    groups[{r.method, r.d, r.N, r.q, r.p}].push_back(&r);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [key, grows] : groups) {
    std::vector<double> tprs, fprs, accs;
    for (const auto* r : grows) {
      if (r->tpr) tprs.push_back(*r->tpr);
      fprs.push_back(r->fpr);
      if (r->accuracy) accs.push_back(*r->accuracy);
    }
    nlohmann::json js{{"method", key.method}, {"d", key.d}, {"N", key.N},
                      {"p", key.p},           {"q", key.q}};
    for (auto [name, pct] : {std::pair{"p25", 25.0}, {"p50", 50.0}, {"p75", 75.0}}) {
      nlohmann::json block;
      block["tpr"] = tprs.empty() ? nlohmann::json(nullptr)
                                  : nlohmann::json(percentile(tprs, pct));
      block["fpr"] = percentile(fprs, pct);
      block["accuracy"] = accs.empty() ? nlohmann::json(nullptr)
                                       : nlohmann::json(percentile(accs, pct));
      js[name] = std::move(block);
    }
    summary.push_back(std::move(js));
  }
  return nlohmann::json{
      {"schema", "trimfit-report/1"}, {"rows", std::move(rows)}, {"summary", std::move(summary)}};
}

void emit_report(const ResultTable& table, const std::string& format,
                 const std::string& path) {
  if (table.rows.empty()) throw std::invalid_argument("emit_report: empty table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  if (format == "csv") {
    out << render_csv(table);
  } else if (format == "json") {
    out << render_json(table).dump(2) << '\n';
  } else {
    throw std::invalid_argument("emit_report: unknown format '" + format + "'");
  }
  if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Synthetic digit corpus

void synthesize_digit_idx(const std::string& images_path, const std::string& labels_path,
                          int count, std::uint64_t seed, double noise) {
  constexpr int kSide = 28;
  constexpr int kPixels = kSide * kSide;
  constexpr int kClasses = 10;

  // Class prototypes come from a fixed stream so corpora written with
  // different seeds (train vs test) share the same class structure.
  Rng proto_rng(0x5D161751u);
  std::vector<std::array<double, kPixels>> proto(kClasses);
  for (int c = 0; c < kClasses; ++c) {
    proto[c].fill(0.0);
    for (int blob = 0; blob < 3; ++blob) {
      double cx = 4.0 + 20.0 * proto_rng.uniform();
      double cy = 4.0 + 20.0 * proto_rng.uniform();
      double sigma = 2.0 + 3.0 * proto_rng.uniform();
      double amp = 0.6 + 0.4 * proto_rng.uniform();
      for (int r = 0; r < kSide; ++r)
        for (int col = 0; col < kSide; ++col) {
          double dx = col - cx, dy = r - cy;
          proto[c][r * kSide + col] +=
              amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
    double mx = *std::max_element(proto[c].begin(), proto[c].end());
    for (double& v : proto[c]) v /= mx;
  }

  Rng rng(seed);
  std::vector<std::uint8_t> images(static_cast<std::size_t>(count) * kPixels);
  std::vector<std::uint8_t> labels(count);
  for (int i = 0; i < count; ++i) {
    int c = static_cast<int>(rng.integer(kClasses));
    labels[i] = static_cast<std::uint8_t>(c);
    for (int px = 0; px < kPixels; ++px) {
      double v = proto[c][px] + noise * rng.normal();
      v = std::clamp(v, 0.0, 1.0);
      images[static_cast<std::size_t>(i) * kPixels + px] =
          static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  write_idx(images_path, {count, kSide, kSide}, images);
  write_idx(labels_path, {count}, labels);
}

}  // namespace trimfit
