#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dgpo/config.hpp"
#include "dgpo/env.hpp"
#include "dgpo/latent_policy.hpp"
#include "dgpo/rng.hpp"

namespace dgpo {

// Which per-step diversity signal fills r_int.
enum class IntrinsicKind { kLogOdds, kMutualInfo, kZero };

// One training iteration's worth of transitions. Arrays are env-major:
// index = env * n_steps + t, so each environment's steps are contiguous.
struct RolloutBuffer {
  std::size_t n_envs = 0;
  std::size_t n_steps = 0;
  std::size_t obs_dim = 0;

  std::vector<double> obs;       // (n_envs * n_steps) x obs_dim
  std::vector<double> next_obs;  // same shape
  std::vector<std::size_t> action;
  std::vector<double> log_prob;
  std::vector<double> r_ext;
  std::vector<double> r_int;
  std::vector<std::size_t> z;
  std::vector<std::uint8_t> done;
  std::vector<double> v_ex;
  std::vector<double> v_in;

  // Critic bootstraps at each env's trailing observation (0 when the final
  // stored step ended the episode).
  std::vector<double> bootstrap_ex;  // per env
  std::vector<double> bootstrap_in;  // per env

  struct Episode {
    std::size_t z = 0;
    double discounted_ext = 0.0;
    double discounted_int = 0.0;
    double undiscounted_ext = 0.0;
    std::size_t length = 0;
  };
  std::vector<Episode> episodes;  // completed during this iteration

  std::size_t total_steps() const { return n_envs * n_steps; }
  const double* obs_at(std::size_t i) const { return obs.data() + i * obs_dim; }
};

// Owns the vector of environment instances and the per-episode latent
// assignment; persists mid-episode state across iterations.
class RolloutCollector {
 public:
  RolloutCollector(const ExperimentConfig& cfg, IntrinsicKind intrinsic,
                   double intrinsic_scale, std::uint64_t seed);

  // Runs every environment n_steps steps under the given (frozen) policy.
  void collect(const LatentPolicy& policy, RolloutBuffer& buffer);

  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t n_actions() const { return n_actions_; }

 private:
  struct Slot {
    std::unique_ptr<Env> env;
    EnvObs obs;
    std::size_t z = 0;
    double discounted_ext = 0.0;
    double discounted_int = 0.0;
    double undiscounted_ext = 0.0;
    double discount = 1.0;
    std::size_t ep_len = 0;
    std::uint64_t episode_counter = 0;
  };

  std::size_t next_latent();
  void start_episode(Slot& slot);

  ExperimentConfig cfg_;
  IntrinsicKind intrinsic_;
  double intrinsic_scale_;
  Rng rng_;
  std::vector<Slot> slots_;
  std::uint64_t round_robin_ = 0;
  std::size_t obs_dim_ = 0;
  std::size_t n_actions_ = 0;
};

}  // namespace dgpo
