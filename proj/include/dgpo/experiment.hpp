#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgpo/config.hpp"
#include "dgpo/diversity.hpp"

namespace dgpo {

inline constexpr const char* kVersionString = "dgpo 0.1.0";

// Filenames inside a run directory. Every run is self-describing: resolved
// config snapshot, version string, metrics stream, checkpoints and reports.
struct RunPaths {
  std::string dir;
  std::string config_snapshot() const { return dir + "/config.resolved"; }
  std::string version_file() const { return dir + "/version.txt"; }
  std::string metrics() const { return dir + "/metrics.jsonl"; }
  std::string report() const { return dir + "/report.txt"; }
  std::string trajectories() const { return dir + "/trajectories.jsonl"; }
  std::string final_checkpoint() const { return dir + "/checkpoint_final.dgpo"; }
  std::string periodic_checkpoint(std::size_t iteration) const;
};

// Runs the training loop and writes the metrics stream, gate log fields,
// checkpoints, the resolved-config snapshot and a final evaluation report
// into out_dir.
void run_train(ExperimentConfig cfg, const std::string& out_dir);

// Loads a checkpoint (default: the run's final one), replays the greedy
// policy per latent and writes the diversity report plus a trajectory dump.
DiversityReport run_eval(const std::string& run_dir,
                         const std::string& checkpoint_path,
                         std::size_t episodes_per_latent);

struct SweepRunResult {
  Algo algo = Algo::kDgpo;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::size_t coverage = 0;
  double m_div = 0.0;
  double mean_return = 0.0;  // mean over latents, undiscounted eval return
  long stage_transition = -1;  // first iteration with mask_d = 1, -1 if never
  long first_mask_r = -1;      // first iteration with mask_r = 1, -1 if never
  std::string run_dir;
};

struct SweepOutcome {
  std::vector<SweepRunResult> runs;
  std::string aggregate_path;
};

// Multi-seed sweep; with ablation=true the ablation matrix
// (dgpo, dgpo_no_stage1, dgpo_no_stage2, dgpo_mi_metric) runs per seed.
// jobs > 1 runs independent seeds on worker threads.
SweepOutcome run_sweep(ExperimentConfig base,
                       const std::vector<std::uint64_t>& seeds,
                       std::size_t jobs, bool ablation,
                       const std::string& out_dir);

// Emits plot-ready CSV tables from a completed run directory.
void run_plotdata(const std::string& run_dir);

// Helpers shared with the acceptance suite.
long first_iteration_with_mask(const std::string& metrics_path,
                               const std::string& field);
std::vector<std::uint8_t> mask_history(const std::string& metrics_path,
                                       const std::string& field);

}  // namespace dgpo
