// trimfit command line: config-driven robust-fitting experiments.
//
//   trimfit run <spec.toml> [--seed S] [--out PATH] [--threads K]
//   trimfit gen-data (--kind regression|digits) [options]
//   trimfit validate <spec.toml>
//
// Exit codes: 0 success, 2 configuration error, 1 runtime failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trimfit/experiment.hpp"
#include "trimfit/rng.hpp"

namespace {

int do_run(const std::string& spec_path, std::optional<std::uint64_t> seed,
           std::optional<std::string> out, std::optional<int> threads) {
  trimfit::ExperimentSpec spec = trimfit::parse_experiment_spec(spec_path);
  if (seed) spec.base_seed = *seed;
  if (out) spec.out_path = *out;
  if (threads) spec.threads = *threads;

  trimfit::RunReport last;
  trimfit::ResultTable table = trimfit::run_experiment(spec, &last);
  trimfit::emit_report(table, spec.format, spec.out_path);
  std::cout << "wrote " << table.rows.size() << " rows to " << spec.out_path << "\n";

  if (spec.kind == trimfit::ExperimentKind::single_run) {
    std::string rp = spec.out_path + ".runreport.json";
    std::ofstream f(rp, std::ios::binary);
    f << last.to_json().dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + rp);
    std::cout << "wrote run report to " << rp << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trimfit: trimmed-estimator fitting via manifold sampling"};
  app.require_subcommand(1);

  // run
  std::string spec_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::string> out_opt;
  std::optional<int> threads_opt;
  auto* run = app.add_subcommand("run", "execute an experiment spec");
  run->add_option("spec", spec_path, "TOML experiment spec")->required();
  run->add_option("--seed", seed_opt, "override the base seed");
  run->add_option("--out", out_opt, "override the output path");
  run->add_option("--threads", threads_opt, "worker pool size (1 = serial)");

  // gen-data
  std::string gd_kind = "regression", gd_out = "data.csv";
  int gd_d = 5, gd_N = 1000, gd_count = 2000;
  std::uint64_t gd_seed = 0;
  bool gd_contaminate = false;
  std::string gd_images = "images.idx", gd_labels = "labels.idx";
  auto* gen = app.add_subcommand("gen-data", "generate a dataset");
  gen->add_option("--kind", gd_kind, "regression | digits")->check(CLI::IsMember({"regression", "digits"}));
  gen->add_option("--d", gd_d, "feature dimension (regression)");
  gen->add_option("--N", gd_N, "dataset size (regression)");
  gen->add_option("--count", gd_count, "image count (digits)");
  gen->add_option("--seed", gd_seed, "generator seed");
  gen->add_flag("--contaminate", gd_contaminate, "apply 40% contamination (regression)");
  gen->add_option("--out", gd_out, "output CSV path (regression)");
  gen->add_option("--images", gd_images, "output IDX image path (digits)");
  gen->add_option("--labels", gd_labels, "output IDX label path (digits)");

  // validate
  std::string val_path;
  auto* val = app.add_subcommand("validate", "lint an experiment spec");
  val->add_option("spec", val_path, "TOML experiment spec")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(spec_path, seed_opt, out_opt, threads_opt);
    if (gen->parsed()) {
      if (gd_kind == "regression") {
        trimfit::Dataset data = trimfit::generate_regression(gd_d, gd_N, gd_seed);
        if (gd_contaminate)
          data = trimfit::contaminate_regression(
              data, trimfit::Rng(gd_seed).split(1).seed());
        trimfit::write_dataset_csv(data, gd_out);
        std::cout << "wrote " << data.size() << " points to " << gd_out << "\n";
      } else {
        trimfit::synthesize_digit_idx(gd_images, gd_labels, gd_count, gd_seed);
        std::cout << "wrote " << gd_count << " images to " << gd_images << " / "
                  << gd_labels << "\n";
      }
      return 0;
    }
    if (val->parsed()) {
      trimfit::parse_experiment_spec(val_path);
      std::cout << "spec OK\n";
      return 0;
    }
  } catch (const trimfit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
