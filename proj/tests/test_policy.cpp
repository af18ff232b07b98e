#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dgpo/distributions.hpp"
#include "dgpo/four_goals.hpp"
#include "dgpo/latent_policy.hpp"
#include "dgpo/trainer.hpp"

using namespace dgpo;

namespace {

LatentPolicy test_policy(std::size_t n_z, std::uint64_t seed = 9) {
  Rng rng(seed);
  return make_latent_policy(11, 8, n_z, {16, 16}, Activation::kTanh, rng);
}

EnvObs some_obs() {
  FourGoalsEnv env;
  EnvObs obs = env.reset(0);
  return obs;
}

}  // namespace

TEST_CASE("sample_latent is uniform and degenerate cases hold") {
  Rng rng(1);
  CHECK(sample_latent({1}, rng) == 0);
  CHECK(latent_log_prob({4}) == doctest::Approx(-std::log(4.0)).epsilon(1e-12));

  std::vector<std::size_t> counts(4, 0);
  for (int i = 0; i < 100000; ++i) counts[sample_latent({4}, rng)]++;
  for (std::size_t c : counts) {
    CHECK(static_cast<double>(c) / 100000.0 == doctest::Approx(0.25).epsilon(0.08));
  }
}

TEST_CASE("fresh policy acts near uniformly") {
  const LatentPolicy policy = test_policy(4);
  const EnvObs obs = some_obs();
  for (std::size_t z = 0; z < 4; ++z) {
    const auto probs = softmax_probs(actor_logits(policy, obs, z));
    double tv = 0.0;
    for (double p : probs) tv += std::fabs(p - 1.0 / 8.0);
    CHECK(tv / 2.0 <= 0.05);
  }
}

TEST_CASE("act rejects out-of-range latents and is replay deterministic") {
  const LatentPolicy policy = test_policy(3);
  const EnvObs obs = some_obs();
  Rng rng(5);
  CHECK_THROWS_AS(act(policy, obs, 3, rng), std::invalid_argument);

  Rng a(123), b(123);
  for (int i = 0; i < 50; ++i) {
    const ActResult ra = act(policy, obs, i % 3, a);
    const ActResult rb = act(policy, obs, i % 3, b);
    CHECK(ra.action == rb.action);
    CHECK(ra.log_prob == rb.log_prob);
    CHECK(ra.v_ex == rb.v_ex);
    CHECK(ra.v_in == rb.v_in);
  }
}

TEST_CASE("latent conditioning path is live") {
  // gradient of the actor output w.r.t. the one-hot latent inputs is nonzero
  const LatentPolicy policy = test_policy(4, 77);
  const EnvObs obs = some_obs();
  std::vector<double> input;
  build_latent_input(obs, 0, policy.n_z, input);
  std::vector<double> output_grad(policy.n_actions, 0.0);
  output_grad[0] = 1.0;
  const MlpGradients grads =
      mlp_backward(policy.actor.spec, policy.actor.params, input, output_grad);
  double latent_grad_norm = 0.0;
  for (std::size_t k = policy.obs_dim; k < input.size(); ++k) {
    latent_grad_norm += std::fabs(grads.input_grad[k]);
  }
  CHECK(latent_grad_norm > 1e-6);

  // and distinct latents can produce distinct logits
  const auto l0 = actor_logits(policy, obs, 0);
  const auto l1 = actor_logits(policy, obs, 1);
  double diff = 0.0;
  for (std::size_t a = 0; a < l0.size(); ++a) diff += std::fabs(l0[a] - l1[a]);
  CHECK(diff > 1e-6);
}

TEST_CASE("act never mutates parameters") {
  const LatentPolicy policy = test_policy(2);
  const std::vector<double> actor_before = policy.actor.params.values;
  const EnvObs obs = some_obs();
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    act(policy, obs, 0, rng);
    discriminator_probs(policy, obs);
  }
  CHECK(policy.actor.params.values == actor_before);
}

TEST_CASE("discriminator probabilities form a distribution") {
  const LatentPolicy policy = test_policy(5);
  const EnvObs obs = some_obs();
  const auto q = discriminator_probs(policy, obs);
  REQUIRE(q.size() == 5);
  double sum = 0.0;
  for (double p : q) {
    CHECK(p > 0.0);
    sum += p;
  }
  CHECK(std::fabs(sum - 1.0) <= 1e-12);

  // zeroed final layer: exactly uniform
  LatentPolicy zeroed = policy;
  const std::size_t last = zeroed.discriminator.spec.hidden.size();
  const std::string prefix = "layer" + std::to_string(last);
  double* w = zeroed.discriminator.params.block_data(prefix + ".weight");
  const auto& shape = zeroed.discriminator.params.block(prefix + ".weight");
  std::fill(w, w + shape.size(), 0.0);
  const auto uniform = discriminator_probs(zeroed, obs);
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("discriminator trains to high accuracy on separable states") {
  // synthetic linearly separable clusters, one per latent
  Rng rng(55);
  LatentPolicy policy =
      make_latent_policy(2, 3, 2, {16, 16}, Activation::kTanh, rng);

  std::vector<double> states;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 256; ++i) {
    const std::size_t z = i % 2;
    states.push_back((z == 0 ? -1.0 : 1.0) + rng.uniform(-0.3, 0.3));
    states.push_back(rng.uniform(-0.3, 0.3));
    labels.push_back(z);
  }

  AdamState opt = make_adam_state(policy.discriminator.params.size(), 3e-3);
  MlpWorkspace ws;
  MlpScratch scratch;
  ParamVector grads = make_param_vector(policy.discriminator.params.layout);
  for (int epoch = 0; epoch < 200; ++epoch) {
    std::fill(grads.values.begin(), grads.values.end(), 0.0);
    for (int i = 0; i < 256; ++i) {
      mlp_forward_ws(policy.discriminator.spec, policy.discriminator.params,
                     states.data() + i * 2, ws);
      const auto probs = softmax_probs(ws.acts.back());
      std::vector<double> dlogits(2);
      for (std::size_t c = 0; c < 2; ++c) {
        dlogits[c] = (probs[c] - (c == labels[i] ? 1.0 : 0.0)) / 256.0;
      }
      mlp_backward_ws(policy.discriminator.spec, policy.discriminator.params,
                      ws, dlogits.data(), grads, nullptr, scratch);
    }
    adam_step(opt, policy.discriminator.params, grads);
  }

  std::size_t correct = 0;
  double correct_prob = 0.0;
  for (int i = 0; i < 256; ++i) {
    EnvObs obs;
    obs.features = {states[i * 2], states[i * 2 + 1]};
    const auto q = discriminator_probs(policy, obs);
    if ((q[1] > q[0]) == (labels[i] == 1)) ++correct;
    correct_prob += q[labels[i]];
  }
  CHECK(correct == 256);
  CHECK(correct_prob / 256.0 >= 0.9);
}

TEST_CASE("policy checkpoints bundle all four networks and n_z") {
  const LatentPolicy policy = test_policy(3, 41);
  const std::string path =
      (std::filesystem::temp_directory_path() / "dgpo_policy_ckpt.dgpo").string();
  save_checkpoint(path, policy_to_checkpoint(policy));
  const LatentPolicy loaded = policy_from_checkpoint(load_checkpoint(path));
  CHECK(loaded.n_z == 3);
  CHECK(loaded.obs_dim == policy.obs_dim);
  CHECK(loaded.n_actions == policy.n_actions);
  CHECK(loaded.actor.params.values == policy.actor.params.values);
  CHECK(loaded.critic_ex.params.values == policy.critic_ex.params.values);
  CHECK(loaded.critic_in.params.values == policy.critic_in.params.values);
  CHECK(loaded.discriminator.params.values == policy.discriminator.params.values);
  std::filesystem::remove(path);
}
