#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dgpo/experiment.hpp"
#include "dgpo/log.hpp"

namespace {

// exit codes: 0 success, 1 usage error, 2 runtime failure
constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

dgpo::ExperimentConfig load_config(const std::string& config_path,
                                   const std::vector<std::string>& overrides) {
  dgpo::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = dgpo::parse_config_file(config_path);
  }
  for (const std::string& assignment : overrides) {
    dgpo::apply_override(cfg, assignment);
  }
  return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds: empty seed list");
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversity-guided policy optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;

  auto* train = app.add_subcommand("train", "train a policy");
  train->add_option("--config", config_path, "config file (key = value lines)");
  train->add_option("--set", overrides, "override, key=value (repeatable)");
  train->add_option("--out", out_dir, "output run directory")->required();

  std::string eval_run_dir;
  std::string eval_checkpoint;
  std::size_t eval_episodes = 8;
  auto* eval = app.add_subcommand("eval", "evaluate a trained checkpoint");
  eval->add_option("--run", eval_run_dir, "run directory")->required();
  eval->add_option("--checkpoint", eval_checkpoint,
                   "checkpoint file (default: the run's final checkpoint)");
  eval->add_option("--episodes", eval_episodes, "evaluation episodes per latent");

  std::string seeds_csv = "1,2,3,4,5";
  std::size_t jobs = 1;
  bool ablation = false;
  auto* sweep = app.add_subcommand("sweep", "multi-seed sweep");
  sweep->add_option("--config", config_path, "config file");
  sweep->add_option("--set", overrides, "override, key=value (repeatable)");
  sweep->add_option("--seeds", seeds_csv, "comma-separated seed list");
  sweep->add_option("--jobs", jobs, "parallel worker threads");
  sweep->add_flag("--ablation", ablation,
                  "run the ablation matrix (dgpo, dgpo_no_stage1, "
                  "dgpo_no_stage2, dgpo_mi_metric)");
  sweep->add_option("--out", out_dir, "output directory")->required();

  std::string plot_run_dir;
  auto* plot = app.add_subcommand("plot-data", "emit plot-ready CSV tables");
  plot->add_option("--run", plot_run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (train->parsed()) {
      dgpo::ExperimentConfig cfg = load_config(config_path, overrides);
      dgpo::run_train(cfg, out_dir);
    } else if (eval->parsed()) {
      const dgpo::DiversityReport report =
          dgpo::run_eval(eval_run_dir, eval_checkpoint, eval_episodes);
      std::cout << dgpo::report_to_text(report);
    } else if (sweep->parsed()) {
      dgpo::ExperimentConfig cfg = load_config(config_path, overrides);
      const dgpo::SweepOutcome outcome =
          dgpo::run_sweep(cfg, parse_seeds(seeds_csv), jobs, ablation, out_dir);
      std::cout << "aggregate report: " << outcome.aggregate_path << "\n";
    } else if (plot->parsed()) {
      dgpo::run_plotdata(plot_run_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
