#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dgpo/checkpoint.hpp"
#include "dgpo/env.hpp"
#include "dgpo/mlp.hpp"
#include "dgpo/rng.hpp"

namespace dgpo {

struct Network {
  MlpSpec spec;
  ParamVector params;
};

// Uniform categorical prior over latent codes.
struct LatentPrior {
  std::size_t n_z = 1;
};

std::size_t sample_latent(const LatentPrior& prior, Rng& rng);
double latent_log_prob(const LatentPrior& prior);

// Latent-conditioned actor, two critics (extrinsic / intrinsic) and the
// latent-code discriminator. Actor and critics consume obs ++ onehot(z);
// the discriminator consumes the observation alone.
struct LatentPolicy {
  Network actor;          // obs_dim + n_z -> n_actions
  Network critic_ex;      // obs_dim + n_z -> 1
  Network critic_in;      // obs_dim + n_z -> 1
  Network discriminator;  // obs_dim -> n_z
  std::size_t n_z = 1;
  std::size_t obs_dim = 0;
  std::size_t n_actions = 0;
};

LatentPolicy make_latent_policy(std::size_t obs_dim, std::size_t n_actions,
                                std::size_t n_z,
                                const std::vector<std::size_t>& hidden,
                                Activation activation, Rng& rng,
                                double latent_init_gain = 1.0);

// Writes obs ++ onehot(z) into `out` (resized to obs_dim + n_z).
void build_latent_input(const EnvObs& obs, std::size_t z, std::size_t n_z,
                        std::vector<double>& out);

struct ActResult {
  std::size_t action = 0;
  double log_prob = 0.0;
  double v_ex = 0.0;
  double v_in = 0.0;
};

// Samples an action from the actor's softmax and evaluates both critics on
// the same (obs, z) input. Does not mutate parameters.
ActResult act(const LatentPolicy& policy, const EnvObs& obs, std::size_t z,
              Rng& rng);

std::vector<double> actor_logits(const LatentPolicy& policy, const EnvObs& obs,
                                 std::size_t z);
std::size_t greedy_action(const LatentPolicy& policy, const EnvObs& obs,
                          std::size_t z);
double value_ex(const LatentPolicy& policy, const EnvObs& obs, std::size_t z);
double value_in(const LatentPolicy& policy, const EnvObs& obs, std::size_t z);

// Softmax of the discriminator logits at obs: q(z|s).
std::vector<double> discriminator_probs(const LatentPolicy& policy,
                                        const EnvObs& obs);

// Checkpoint bundling under the section names "actor", "critic_ex",
// "critic_in", "discriminator".
Checkpoint policy_to_checkpoint(const LatentPolicy& policy);
LatentPolicy policy_from_checkpoint(const Checkpoint& ckpt);

}  // namespace dgpo
