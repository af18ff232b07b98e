#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dgpo/adam.hpp"
#include "dgpo/config.hpp"
#include "dgpo/gates.hpp"
#include "dgpo/latent_policy.hpp"
#include "dgpo/rollout.hpp"

namespace dgpo {

struct TrainStats {
  std::size_t iteration = 0;
  double policy_loss = 0.0;
  double value_loss_ex = 0.0;
  double value_loss_in = 0.0;
  double discriminator_loss = 0.0;
  double entropy = 0.0;
  double mean_ext_return = 0.0;  // undiscounted, completed episodes
  double mean_int_return = 0.0;  // discounted intrinsic, completed episodes
  std::size_t episodes = 0;
  bool gates_updated = false;
  bool mask_d = false;
  bool mask_r = false;
  double j_ext_ema = 0.0;
  double j_div_ema = 0.0;
  double wall_time = 0.0;  // seconds; console only, kept out of the metrics stream
};

// Gradient of the clipped surrogate objective w.r.t. the new log-prob, for
// one sample: d/dlp of -min(ratio * A, clip(ratio, 1-eps, 1+eps) * A).
double clipped_surrogate_grad(double advantage, double log_ratio,
                              double clip_eps);

// In-place batch normalization to mean 0 / std 1 (no-op on singletons with
// zero variance beyond centering).
void normalize_advantages(std::vector<double>& advantages);

// The DGPO training loop. Owns the policy, optimizer states, gate state and
// environment slots; one call to run_iteration() performs the full
// collect -> gate -> compose -> GAE -> PPO -> discriminator cycle.
class Trainer {
 public:
  explicit Trainer(const ExperimentConfig& cfg);

  TrainStats run_iteration();

  const LatentPolicy& policy() const { return policy_; }
  const ExperimentConfig& config() const { return cfg_; }
  const RolloutBuffer& last_buffer() const { return buffer_; }

  // Exposed for focused tests.
  struct UpdateResult {
    double policy_loss = 0.0;
    double value_loss_ex = 0.0;
    double value_loss_in = 0.0;
    double entropy = 0.0;
  };
  UpdateResult ppo_update(const RolloutBuffer& buffer,
                          const std::vector<double>& advantages,
                          const std::vector<double>& target_ex,
                          const std::vector<double>& target_in);
  double discriminator_update(const RolloutBuffer& buffer);

  // Current gate masks (index 0 when gates are global).
  const std::vector<GateState>& gates() const { return gates_; }

 private:
  void apply_forced_masks();
  GateState& gate_for(std::size_t z) {
    return gates_[cfg_.per_latent_gates ? z : 0];
  }

  ExperimentConfig cfg_;
  Rng rng_;
  LatentPolicy policy_;
  AdamState opt_actor_;
  AdamState opt_critic_ex_;
  AdamState opt_critic_in_;
  AdamState opt_disc_;
  RolloutCollector collector_;
  RolloutBuffer buffer_;
  std::vector<GateState> gates_;
  std::size_t iteration_ = 0;
};

// Per-iteration hook; return false to stop early.
using IterationCallback = std::function<bool(const Trainer&, const TrainStats&)>;

// Runs the configured number of iterations, invoking the callback after each.
// Returns the trained policy.
LatentPolicy train(const ExperimentConfig& cfg, const IterationCallback& cb);

}  // namespace dgpo
