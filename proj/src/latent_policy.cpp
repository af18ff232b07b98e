#include "dgpo/latent_policy.hpp"

#include <stdexcept>

#include "dgpo/distributions.hpp"

namespace dgpo {

std::size_t sample_latent(const LatentPrior& prior, Rng& rng) {
  if (prior.n_z < 1) throw std::invalid_argument("LatentPrior: n_z must be >= 1");
  if (prior.n_z == 1) return 0;
  return static_cast<std::size_t>(rng.uniform_int(prior.n_z));
}

double latent_log_prob(const LatentPrior& prior) {
  return -std::log(static_cast<double>(prior.n_z));
}

LatentPolicy make_latent_policy(std::size_t obs_dim, std::size_t n_actions,
                                std::size_t n_z,
                                const std::vector<std::size_t>& hidden,
                                Activation activation, Rng& rng,
                                double latent_init_gain) {
  if (n_z < 1) throw std::invalid_argument("make_latent_policy: n_z must be >= 1");
  LatentPolicy p;
  p.n_z = n_z;
  p.obs_dim = obs_dim;
  p.n_actions = n_actions;

  const std::size_t cond_dim = obs_dim + n_z;
  p.actor.spec = {cond_dim, hidden, n_actions, activation};
  p.critic_ex.spec = {cond_dim, hidden, 1, activation};
  p.critic_in.spec = {cond_dim, hidden, 1, activation};
  p.discriminator.spec = {obs_dim, hidden, n_z, activation};

  // Final policy and discriminator layers scaled down so the initial action
  // distribution and q(z|s) are near uniform.
  p.actor.params = mlp_init_params(p.actor.spec, rng, 0.01);
  p.critic_ex.params = mlp_init_params(p.critic_ex.spec, rng, 1.0);
  p.critic_in.params = mlp_init_params(p.critic_in.spec, rng, 1.0);
  p.discriminator.params = mlp_init_params(p.discriminator.spec, rng, 0.01);

  // Boost the actor's first-layer weights on the one-hot latent inputs so
  // each code starts with its own behavioral bias; the discriminator needs
  // that asymmetry to bootstrap the diversity reward.
  if (latent_init_gain != 1.0 && !hidden.empty()) {
    double* w = p.actor.params.block_data("layer0.weight");
    for (std::size_t o = 0; o < hidden[0]; ++o) {
      for (std::size_t i = obs_dim; i < cond_dim; ++i) {
        w[o * cond_dim + i] *= latent_init_gain;
      }
    }
  }
  return p;
}

void build_latent_input(const EnvObs& obs, std::size_t z, std::size_t n_z,
                        std::vector<double>& out) {
  out.resize(obs.features.size() + n_z);
  std::copy(obs.features.begin(), obs.features.end(), out.begin());
  std::fill(out.begin() + obs.features.size(), out.end(), 0.0);
  out[obs.features.size() + z] = 1.0;
}

namespace {

void check_latent(const LatentPolicy& policy, std::size_t z) {
  if (z >= policy.n_z) {
    throw std::invalid_argument("latent code out of range");
  }
}

}  // namespace

std::vector<double> actor_logits(const LatentPolicy& policy, const EnvObs& obs,
                                 std::size_t z) {
  check_latent(policy, z);
  std::vector<double> input;
  build_latent_input(obs, z, policy.n_z, input);
  return mlp_forward(policy.actor.spec, policy.actor.params, input);
}

ActResult act(const LatentPolicy& policy, const EnvObs& obs, std::size_t z,
              Rng& rng) {
  check_latent(policy, z);
  std::vector<double> input;
  build_latent_input(obs, z, policy.n_z, input);
  const std::vector<double> logits =
      mlp_forward(policy.actor.spec, policy.actor.params, input);
  const CategoricalSample s = categorical_sample(logits, rng);

  ActResult res;
  res.action = s.index;
  res.log_prob = s.log_prob;
  res.v_ex = mlp_forward(policy.critic_ex.spec, policy.critic_ex.params, input)[0];
  res.v_in = mlp_forward(policy.critic_in.spec, policy.critic_in.params, input)[0];
  return res;
}

std::size_t greedy_action(const LatentPolicy& policy, const EnvObs& obs,
                          std::size_t z) {
  return argmax(actor_logits(policy, obs, z));
}

double value_ex(const LatentPolicy& policy, const EnvObs& obs, std::size_t z) {
  check_latent(policy, z);
  std::vector<double> input;
  build_latent_input(obs, z, policy.n_z, input);
  return mlp_forward(policy.critic_ex.spec, policy.critic_ex.params, input)[0];
}

double value_in(const LatentPolicy& policy, const EnvObs& obs, std::size_t z) {
  check_latent(policy, z);
  std::vector<double> input;
  build_latent_input(obs, z, policy.n_z, input);
  return mlp_forward(policy.critic_in.spec, policy.critic_in.params, input)[0];
}

std::vector<double> discriminator_probs(const LatentPolicy& policy,
                                        const EnvObs& obs) {
  const std::vector<double> logits = mlp_forward(
      policy.discriminator.spec, policy.discriminator.params, obs.features);
  return softmax_probs(logits);
}

Checkpoint policy_to_checkpoint(const LatentPolicy& policy) {
  Checkpoint ckpt;
  ckpt.n_z = static_cast<std::uint32_t>(policy.n_z);
  ckpt.sections = {
      {"actor", policy.actor.spec, policy.actor.params},
      {"critic_ex", policy.critic_ex.spec, policy.critic_ex.params},
      {"critic_in", policy.critic_in.spec, policy.critic_in.params},
      {"discriminator", policy.discriminator.spec, policy.discriminator.params},
  };
  return ckpt;
}

LatentPolicy policy_from_checkpoint(const Checkpoint& ckpt) {
  LatentPolicy p;
  p.n_z = ckpt.n_z;
  auto find = [&](const std::string& name) -> const CheckpointSection& {
    for (const CheckpointSection& s : ckpt.sections) {
      if (s.name == name) return s;
    }
    throw std::runtime_error("checkpoint: missing section '" + name + "'");
  };
  const CheckpointSection& actor = find("actor");
  p.actor = {actor.spec, actor.params};
  const CheckpointSection& cex = find("critic_ex");
  p.critic_ex = {cex.spec, cex.params};
  const CheckpointSection& cin = find("critic_in");
  p.critic_in = {cin.spec, cin.params};
  const CheckpointSection& disc = find("discriminator");
  p.discriminator = {disc.spec, disc.params};

  p.obs_dim = disc.spec.input_dim;
  p.n_actions = actor.spec.output_dim;
  if (actor.spec.input_dim != p.obs_dim + p.n_z ||
      disc.spec.output_dim != p.n_z) {
    throw std::runtime_error("checkpoint: inconsistent network dimensions");
  }
  return p;
}

}  // namespace dgpo
