#include "dgpo/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dgpo/behavior.hpp"
#include "dgpo/checkpoint.hpp"
#include "dgpo/log.hpp"
#include "dgpo/trainer.hpp"

namespace dgpo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string RunPaths::periodic_checkpoint(std::size_t iteration) const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoint_%06zu.dgpo", iteration);
  return dir + "/" + buf;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

void dump_trajectories(const std::string& path, std::uint64_t seed,
                       const EvalResult& eval) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (std::size_t z = 0; z < eval.trajectories.size(); ++z) {
    json steps = json::array();
    for (const EvalTrajectoryStep& s : eval.trajectories[z]) {
      steps.push_back({{"step", s.step},
                       {"x", s.x},
                       {"y", s.y},
                       {"reward", s.reward},
                       {"done", s.done}});
    }
    const json line = {{"seed", seed}, {"latent", z}, {"steps", steps}};
    os << line.dump() << "\n";
  }
}

}  // namespace

void run_train(ExperimentConfig cfg, const std::string& out_dir) {
  cfg.output_dir = out_dir;
  resolve_config(cfg);
  if (cfg.algo == Algo::kDgpo && cfg.n_z == 1) {
    log_warn("dgpo with n_z = 1 has no competing latent code; behaves as ppo");
  }

  RunPaths paths{out_dir};
  fs::create_directories(paths.dir);
  write_file(paths.config_snapshot(), config_to_text(cfg));
  write_file(paths.version_file(), std::string(kVersionString) + "\n");

  std::ofstream metrics(paths.metrics(), std::ios::trunc);
  if (!metrics) throw std::runtime_error("cannot write " + paths.metrics());

  Trainer trainer(cfg);
  double last_m_div = 0.0;
  std::size_t last_coverage = 0;
  double total_time = 0.0;

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    const TrainStats stats = trainer.run_iteration();
    total_time += stats.wall_time;

    if (it == 1 || it % cfg.eval_every == 0 || it == cfg.iterations) {
      const EvalResult eval =
          evaluate_policy(trainer.policy(), cfg.env, cfg.eval_episodes);
      last_m_div = eval.report.m_div;
      last_coverage = eval.report.coverage;
    }

    json rec = {
        {"iteration", stats.iteration},
        {"policy_loss", stats.policy_loss},
        {"value_loss_ex", stats.value_loss_ex},
        {"value_loss_in", stats.value_loss_in},
        {"discriminator_loss", stats.discriminator_loss},
        {"entropy", stats.entropy},
        {"mean_ext_return", stats.mean_ext_return},
        {"mean_int_return", stats.mean_int_return},
        {"episodes", stats.episodes},
        {"mask_d", stats.mask_d},
        {"mask_r", stats.mask_r},
        {"j_ext_ema", stats.j_ext_ema},
        {"j_div_ema", stats.j_div_ema},
        {"eval_m_div", last_m_div},
        {"eval_coverage", last_coverage},
    };
    if (!stats.gates_updated) rec["gates_stale"] = true;
    metrics << rec.dump() << "\n";

    if (cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0 &&
        it != cfg.iterations) {
      save_checkpoint(paths.periodic_checkpoint(it),
                      policy_to_checkpoint(trainer.policy()));
    }
    if (it % 50 == 0 || it == cfg.iterations) {
      std::ostringstream msg;
      msg << algo_name(cfg.algo) << " seed " << cfg.seed << " iter " << it << "/"
          << cfg.iterations << " return " << stats.mean_ext_return << " m_div "
          << last_m_div << " masks " << stats.mask_d << stats.mask_r << " ("
          << total_time << "s)";
      log_info(msg.str());
    }
  }
  metrics.close();

  save_checkpoint(paths.final_checkpoint(),
                  policy_to_checkpoint(trainer.policy()));

  const EvalResult eval =
      evaluate_policy(trainer.policy(), cfg.env, cfg.eval_episodes);
  write_file(paths.report(), report_to_text(eval.report));
  dump_trajectories(paths.trajectories(), cfg.seed, eval);
}

DiversityReport run_eval(const std::string& run_dir,
                         const std::string& checkpoint_path,
                         std::size_t episodes_per_latent) {
  RunPaths paths{run_dir};
  if (!fs::exists(paths.config_snapshot())) {
    throw std::invalid_argument("run_eval: no config snapshot in " + run_dir);
  }
  ExperimentConfig cfg = parse_config_file(paths.config_snapshot());
  resolve_config(cfg);

  const std::string ckpt_path =
      checkpoint_path.empty() ? paths.final_checkpoint() : checkpoint_path;
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.n_z != cfg.n_z) {
    throw std::invalid_argument("run_eval: checkpoint n_z " +
                                std::to_string(ckpt.n_z) +
                                " does not match config n_z " +
                                std::to_string(cfg.n_z));
  }
  const LatentPolicy policy = policy_from_checkpoint(ckpt);
  const auto env = make_env(cfg.env);
  if (policy.obs_dim != env->obs_dim() || policy.n_actions != env->n_actions()) {
    throw std::invalid_argument(
        "run_eval: checkpoint network dimensions do not match environment");
  }

  const EvalResult eval = evaluate_policy(policy, cfg.env, episodes_per_latent);
  write_file(run_dir + "/report_eval.txt", report_to_text(eval.report));
  dump_trajectories(run_dir + "/trajectories_eval.jsonl", cfg.seed, eval);
  return eval.report;
}

long first_iteration_with_mask(const std::string& metrics_path,
                               const std::string& field) {
  std::ifstream is(metrics_path);
  if (!is) throw std::invalid_argument("cannot open " + metrics_path);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    if (rec.at(field).get<bool>()) return rec.at("iteration").get<long>();
  }
  return -1;
}

std::vector<std::uint8_t> mask_history(const std::string& metrics_path,
                                       const std::string& field) {
  std::ifstream is(metrics_path);
  if (!is) throw std::invalid_argument("cannot open " + metrics_path);
  std::vector<std::uint8_t> hist;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    hist.push_back(rec.at(field).get<bool>() ? 1 : 0);
  }
  return hist;
}

namespace {

SweepRunResult execute_run(ExperimentConfig cfg, Algo algo, std::uint64_t seed,
                           const std::string& run_dir) {
  SweepRunResult result;
  result.algo = algo;
  result.seed = seed;
  result.run_dir = run_dir;
  try {
    cfg.algo = algo;
    cfg.seed = seed;
    cfg.delta = 0.0;     // re-derive thresholds for this algo
    cfg.r_target = 0.0;
    cfg.resolved = false;
    run_train(cfg, run_dir);

    RunPaths paths{run_dir};
    const DiversityReport report = run_eval(run_dir, "", cfg.eval_episodes);
    result.coverage = report.coverage;
    result.m_div = report.m_div;
    double sum = 0.0;
    for (double r : report.per_latent_mean_return) sum += r;
    result.mean_return =
        report.per_latent_mean_return.empty()
            ? 0.0
            : sum / static_cast<double>(report.per_latent_mean_return.size());
    result.stage_transition = first_iteration_with_mask(paths.metrics(), "mask_d");
    result.first_mask_r = first_iteration_with_mask(paths.metrics(), "mask_r");
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    log_warn("sweep run failed (" + algo_name(algo) + ", seed " +
             std::to_string(seed) + "): " + result.error);
  }
  return result;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

SweepOutcome run_sweep(ExperimentConfig base,
                       const std::vector<std::uint64_t>& seeds,
                       std::size_t jobs, bool ablation,
                       const std::string& out_dir) {
  if (seeds.empty()) throw std::invalid_argument("run_sweep: need >= 1 seed");
  fs::create_directories(out_dir);

  std::vector<Algo> algos = {base.algo};
  if (ablation) {
    algos = {Algo::kDgpo, Algo::kDgpoNoStage1, Algo::kDgpoNoStage2,
             Algo::kDgpoMiMetric};
  }

  struct Job {
    Algo algo;
    std::uint64_t seed;
    std::string dir;
  };
  std::vector<Job> queue;
  for (Algo algo : algos) {
    for (std::uint64_t seed : seeds) {
      queue.push_back({algo, seed,
                       out_dir + "/" + algo_name(algo) + "_seed" +
                           std::to_string(seed)});
    }
  }

  SweepOutcome outcome;
  outcome.runs.resize(queue.size());

  if (jobs <= 1) {
    for (std::size_t i = 0; i < queue.size(); ++i) {
      outcome.runs[i] =
          execute_run(base, queue[i].algo, queue[i].seed, queue[i].dir);
    }
  } else {
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (next >= queue.size()) return;
          i = next++;
        }
        outcome.runs[i] =
            execute_run(base, queue[i].algo, queue[i].seed, queue[i].dir);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(jobs, queue.size()); ++w) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) t.join();
  }

  // F-score normalization: reward bounds from the environment oracle and a
  // random-policy baseline, diversity bounds min-maxed across this sweep.
  const auto env = make_env(base.env);
  FScoreBounds bounds;
  bounds.j_opt = env->optimal_undiscounted_return();
  bounds.j_rand = random_policy_return(base.env, 1000, 12345);
  bounds.div_min = std::numeric_limits<double>::infinity();
  bounds.div_max = -std::numeric_limits<double>::infinity();
  for (const SweepRunResult& r : outcome.runs) {
    if (!r.ok) continue;
    bounds.div_min = std::min(bounds.div_min, r.m_div);
    bounds.div_max = std::max(bounds.div_max, r.m_div);
  }
  const bool have_div_bounds =
      std::isfinite(bounds.div_min) && bounds.div_min < bounds.div_max;

  std::ostringstream agg;
  agg << "env = " << env_kind_name(base.env) << "\n";
  agg << "seeds =";
  for (std::uint64_t s : seeds) agg << " " << s;
  agg << "\n";
  agg << "j_opt = " << bounds.j_opt << "\n";
  agg << "j_rand = " << bounds.j_rand << "\n\n";

  for (const SweepRunResult& r : outcome.runs) {
    agg << "run algo=" << algo_name(r.algo) << " seed=" << r.seed;
    if (!r.ok) {
      agg << " status=failed error=\"" << r.error << "\"\n";
      continue;
    }
    agg << " status=ok coverage=" << r.coverage << " m_div=" << r.m_div
        << " mean_return=" << r.mean_return
        << " stage_transition=" << r.stage_transition
        << " first_mask_r=" << r.first_mask_r;
    if (have_div_bounds) {
      agg << " f_score=" << f_score(r.mean_return, r.m_div, bounds);
    }
    agg << "\n";
  }
  agg << "\n";

  for (Algo algo : algos) {
    std::vector<double> coverages, m_divs, returns, f_scores;
    std::size_t failed = 0;
    for (const SweepRunResult& r : outcome.runs) {
      if (r.algo != algo) continue;
      if (!r.ok) {
        ++failed;
        continue;
      }
      coverages.push_back(static_cast<double>(r.coverage));
      m_divs.push_back(r.m_div);
      returns.push_back(r.mean_return);
      if (have_div_bounds) {
        f_scores.push_back(f_score(r.mean_return, r.m_div, bounds));
      }
    }
    agg << "summary algo=" << algo_name(algo) << " runs=" << coverages.size()
        << " failed=" << failed << " coverage_mean=" << mean_of(coverages)
        << " m_div_mean=" << mean_of(m_divs)
        << " m_div_stderr=" << stderr_of(m_divs)
        << " return_mean=" << mean_of(returns)
        << " return_stderr=" << stderr_of(returns);
    if (have_div_bounds) agg << " f_score_mean=" << mean_of(f_scores);
    agg << "\n";
  }

  outcome.aggregate_path = out_dir + "/aggregate.txt";
  write_file(outcome.aggregate_path, agg.str());
  return outcome;
}

void run_plotdata(const std::string& run_dir) {
  RunPaths paths{run_dir};
  if (!fs::exists(paths.metrics())) {
    throw std::invalid_argument("run_plotdata: no metrics stream in " + run_dir);
  }

  std::ifstream is(paths.metrics());
  std::ofstream csv(run_dir + "/plot_metrics.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write plot_metrics.csv");
  csv << "iteration,return,m_div,mask_d,mask_r\n";
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    csv << rec.at("iteration").get<long>() << ","
        << rec.at("mean_ext_return").get<double>() << ","
        << rec.at("eval_m_div").get<double>() << ","
        << (rec.at("mask_d").get<bool>() ? 1 : 0) << ","
        << (rec.at("mask_r").get<bool>() ? 1 : 0) << "\n";
  }

  if (fs::exists(paths.trajectories())) {
    std::ifstream tis(paths.trajectories());
    while (std::getline(tis, line)) {
      if (line.empty()) continue;
      const json rec = json::parse(line);
      const std::size_t z = rec.at("latent").get<std::size_t>();
      std::ofstream trace(run_dir + "/trace_latent_" + std::to_string(z) +
                              ".csv",
                          std::ios::trunc);
      trace << "step,x,y,reward,done\n";
      for (const json& s : rec.at("steps")) {
        trace << s.at("step").get<long>() << "," << s.at("x").get<double>()
              << "," << s.at("y").get<double>() << ","
              << s.at("reward").get<double>() << ","
              << (s.at("done").get<bool>() ? 1 : 0) << "\n";
      }
    }
  }
}

}  // namespace dgpo
