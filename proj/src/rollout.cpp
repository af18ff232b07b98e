#include "dgpo/rollout.hpp"

#include <algorithm>
#include <stdexcept>

#include "dgpo/distributions.hpp"
#include "dgpo/rewards.hpp"

namespace dgpo {

RolloutCollector::RolloutCollector(const ExperimentConfig& cfg,
                                   IntrinsicKind intrinsic,
                                   double intrinsic_scale, std::uint64_t seed)
    : cfg_(cfg),
      intrinsic_(intrinsic),
      intrinsic_scale_(intrinsic_scale),
      rng_(seed) {
  slots_.resize(cfg.n_envs);
  for (std::size_t e = 0; e < cfg.n_envs; ++e) {
    Slot& slot = slots_[e];
    slot.env = make_env(cfg.env);
    slot.episode_counter = e;
    // initial assignment is already balanced across codes
    slot.z = cfg.latent_sampling == LatentSampling::kRoundRobin
                 ? next_latent()
                 : sample_latent({cfg.n_z}, rng_);
    slot.obs = slot.env->reset(cfg.seed + e);
  }
  obs_dim_ = slots_[0].env->obs_dim();
  n_actions_ = slots_[0].env->n_actions();
}

std::size_t RolloutCollector::next_latent() {
  return static_cast<std::size_t>(round_robin_++ % cfg_.n_z);
}

void RolloutCollector::start_episode(Slot& slot) {
  slot.episode_counter += cfg_.n_envs;
  slot.z = cfg_.latent_sampling == LatentSampling::kRoundRobin
               ? next_latent()
               : sample_latent({cfg_.n_z}, rng_);
  slot.obs = slot.env->reset(cfg_.seed + slot.episode_counter);
  slot.discounted_ext = 0.0;
  slot.discounted_int = 0.0;
  slot.undiscounted_ext = 0.0;
  slot.discount = 1.0;
  slot.ep_len = 0;
}

void RolloutCollector::collect(const LatentPolicy& policy,
                               RolloutBuffer& buffer) {
  const std::size_t n_envs = cfg_.n_envs;
  const std::size_t n_steps = cfg_.n_steps;
  const std::size_t n = n_envs * n_steps;

  buffer.n_envs = n_envs;
  buffer.n_steps = n_steps;
  buffer.obs_dim = obs_dim_;
  buffer.obs.resize(n * obs_dim_);
  buffer.next_obs.resize(n * obs_dim_);
  buffer.action.resize(n);
  buffer.log_prob.resize(n);
  buffer.r_ext.resize(n);
  buffer.r_int.resize(n);
  buffer.z.resize(n);
  buffer.done.resize(n);
  buffer.v_ex.resize(n);
  buffer.v_in.resize(n);
  buffer.bootstrap_ex.assign(n_envs, 0.0);
  buffer.bootstrap_in.assign(n_envs, 0.0);
  buffer.episodes.clear();

  for (std::size_t t = 0; t < n_steps; ++t) {
    for (std::size_t e = 0; e < n_envs; ++e) {
      Slot& slot = slots_[e];
      const std::size_t i = e * n_steps + t;

      const ActResult a = act(policy, slot.obs, slot.z, rng_);
      StepResult step;
      try {
        step = slot.env->step(a.action);
      } catch (const std::exception& ex) {
        throw std::runtime_error(std::string("rollout: environment fault at env ") +
                                 std::to_string(e) + " step " +
                                 std::to_string(t) + ": " + ex.what());
      }

      double r_int = 0.0;
      if (intrinsic_ != IntrinsicKind::kZero && policy.n_z > 1) {
        // diversity reward at the next state (pre-reset terminal obs on done);
        // observation noise sets the resolution of "distinguishable"
        EnvObs disc_obs = step.obs;
        if (cfg_.disc_obs_noise > 0.0) {
          for (double& f : disc_obs.features) {
            f += cfg_.disc_obs_noise * rng_.normal();
          }
        }
        std::vector<double> q = discriminator_probs(policy, disc_obs);
        if (cfg_.disc_smoothing > 0.0) {
          const double u = cfg_.disc_smoothing / static_cast<double>(policy.n_z);
          for (double& p : q) p = (1.0 - cfg_.disc_smoothing) * p + u;
        }
        r_int = intrinsic_ == IntrinsicKind::kLogOdds
                    ? intrinsic_reward(q, slot.z)
                    : diayn_reward(q, slot.z, policy.n_z);
        if (step.done && cfg_.absorbing_diversity > 0) {
          // Early termination absorbs into the terminal state for the rest
          // of the horizon: the terminal diversity reward recurs, discounted,
          // with the environment's unavoidable shared-goal part removed.
          const std::size_t horizon = slot.env->horizon();
          const std::size_t len = slot.ep_len + 1;
          const double baseline = intrinsic_ == IntrinsicKind::kLogOdds
                                      ? slot.env->terminal_intrinsic_baseline()
                                      : 0.0;
          double tail = 0.0;
          double g = 1.0;
          for (std::size_t k = len; k < horizon; ++k) {
            g *= cfg_.gamma;
            tail += g;
          }
          r_int += (r_int - baseline) * tail;
        }
        r_int *= intrinsic_scale_;
      }

      std::copy(slot.obs.features.begin(), slot.obs.features.end(),
                buffer.obs.begin() + i * obs_dim_);
      std::copy(step.obs.features.begin(), step.obs.features.end(),
                buffer.next_obs.begin() + i * obs_dim_);
      buffer.action[i] = a.action;
      buffer.log_prob[i] = a.log_prob;
      buffer.r_ext[i] = step.reward;
      buffer.r_int[i] = r_int;
      buffer.z[i] = slot.z;
      buffer.done[i] = step.done ? 1 : 0;
      buffer.v_ex[i] = a.v_ex;
      buffer.v_in[i] = a.v_in;

      slot.discounted_ext += slot.discount * step.reward;
      slot.discounted_int += slot.discount * r_int;
      slot.undiscounted_ext += step.reward;
      slot.discount *= cfg_.gamma;
      slot.ep_len += 1;

      if (step.done) {
        buffer.episodes.push_back({slot.z, slot.discounted_ext,
                                   slot.discounted_int, slot.undiscounted_ext,
                                   slot.ep_len});
        start_episode(slot);
      } else {
        slot.obs = step.obs;
      }
    }
  }

  // critic bootstraps for mid-episode truncation
  for (std::size_t e = 0; e < n_envs; ++e) {
    const std::size_t last = e * n_steps + (n_steps - 1);
    if (!buffer.done[last]) {
      buffer.bootstrap_ex[e] = value_ex(policy, slots_[e].obs, slots_[e].z);
      buffer.bootstrap_in[e] = value_in(policy, slots_[e].obs, slots_[e].z);
    }
  }
}

}  // namespace dgpo
