#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "dgpo/distributions.hpp"
#include "dgpo/gae.hpp"
#include "dgpo/rewards.hpp"
#include "dgpo/rollout.hpp"
#include "dgpo/trainer.hpp"

using namespace dgpo;

namespace {

// O(T^2) direct-summation GAE oracle: A_t = sum_l (gamma*lambda)^(l-t) delta_l
// within t's episode segment.
std::vector<double> gae_oracle(const std::vector<double>& rewards,
                               const std::vector<double>& values,
                               const std::vector<std::uint8_t>& dones,
                               double bootstrap, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double coef = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      const double next_v =
          dones[l] ? 0.0 : (l + 1 < n ? values[l + 1] : bootstrap);
      const double delta = rewards[l] + gamma * next_v - values[l];
      adv[t] += coef * delta;
      if (dones[l]) break;
      coef *= gamma * lambda;
    }
  }
  return adv;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.env = EnvKind::kFourGoals;
  cfg.algo = Algo::kDgpo;
  cfg.n_z = 2;
  cfg.seed = 3;
  cfg.iterations = 2;
  cfg.n_envs = 2;
  cfg.n_steps = 16;
  cfg.hidden = {8, 8};
  cfg.eval_every = 1;
  return cfg;
}

}  // namespace

TEST_CASE("intrinsic_reward matches direct evaluations") {
  // uniform q: competitors tie, ln(1/2) regardless of n_z and z
  for (std::size_t n : {2u, 3u, 5u}) {
    const std::vector<double> q(n, 1.0 / n);
    for (std::size_t z = 0; z < n; ++z) {
      CHECK(intrinsic_reward(q, z) ==
            doctest::Approx(std::log(0.5)).epsilon(1e-6));
    }
  }
  CHECK(intrinsic_reward({0.9, 0.1}, 0) ==
        doctest::Approx(std::log(0.9)).epsilon(1e-6));
  CHECK(intrinsic_reward({0.6, 0.3, 0.1}, 0) ==
        doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-6));

  // degenerate single code: defined as 0
  CHECK(intrinsic_reward({1.0}, 0) == 0.0);

  // floored probabilities keep the reward finite
  CHECK(std::isfinite(intrinsic_reward({0.0, 1.0}, 0)));
  CHECK(intrinsic_reward({0.0, 1.0}, 0) < 0.0);
}

TEST_CASE("intrinsic_reward is never positive") {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(5);
    std::vector<double> q(n);
    double sum = 0.0;
    for (double& v : q) {
      v = rng.uniform();
      sum += v;
    }
    for (double& v : q) v /= sum;
    CHECK(intrinsic_reward(q, rng.uniform_int(n)) <= 0.0);
  }
}

TEST_CASE("diayn_reward matches direct evaluations") {
  CHECK(diayn_reward({0.25, 0.25, 0.25, 0.25}, 1, 4) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(diayn_reward({0.9, 0.1}, 0, 2) ==
        doctest::Approx(std::log(0.9) + std::log(2.0)).epsilon(1e-6));
  CHECK(diayn_reward({1.0, 0.0, 0.0}, 0, 3) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-6));
}

TEST_CASE("compute_gae matches the O(T^2) oracle") {
  Rng rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10;
    std::vector<double> rewards(n), values(n);
    std::vector<std::uint8_t> dones(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      rewards[i] = rng.uniform(-1.0, 1.0);
      values[i] = rng.uniform(-1.0, 1.0);
      dones[i] = rng.uniform() < 0.2 ? 1 : 0;
    }
    const double bootstrap = rng.uniform(-1.0, 1.0);
    const double gamma = rng.uniform(0.8, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);

    const GaeResult got =
        compute_gae(rewards, values, dones, bootstrap, gamma, lambda);
    const auto want = gae_oracle(rewards, values, dones, bootstrap, gamma, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got.advantages[i] == doctest::Approx(want[i]).epsilon(1e-10));
      CHECK(got.returns[i] ==
            doctest::Approx(want[i] + values[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("compute_gae limits: lambda 1 and lambda 0") {
  const std::vector<double> rewards = {1.0, -0.5, 0.25, 2.0};
  const std::vector<double> values = {0.3, 0.1, -0.2, 0.4};
  const std::vector<std::uint8_t> dones = {0, 0, 0, 0};
  const double bootstrap = 0.7;
  const double gamma = 0.9;

  // lambda = 1: discounted return minus value
  const GaeResult full = compute_gae(rewards, values, dones, bootstrap, gamma, 1.0);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    double ret = 0.0, coef = 1.0;
    for (std::size_t l = t; l < rewards.size(); ++l) {
      ret += coef * rewards[l];
      coef *= gamma;
    }
    ret += coef * bootstrap;
    CHECK(full.advantages[t] == doctest::Approx(ret - values[t]).epsilon(1e-12));
  }

  // lambda = 0: one-step TD errors
  const GaeResult td = compute_gae(rewards, values, dones, bootstrap, gamma, 0.0);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    const double next_v = t + 1 < values.size() ? values[t + 1] : bootstrap;
    CHECK(td.advantages[t] ==
          doctest::Approx(rewards[t] + gamma * next_v - values[t]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(compute_gae(rewards, values, dones, 0.0, 1.5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(compute_gae(rewards, {0.0}, dones, 0.0, 0.9, 0.5),
                  std::invalid_argument);
}

TEST_CASE("rollout buffers replay bit-identically and balance latents") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_envs = 4;
  cfg.n_steps = 64;
  cfg.n_z = 3;
  resolve_config(cfg);

  Rng prng(1);
  const LatentPolicy policy = make_latent_policy(
      11, 8, cfg.n_z, cfg.hidden, cfg.activation, prng);

  RolloutCollector c1(cfg, IntrinsicKind::kLogOdds, 1.0, 42);
  RolloutCollector c2(cfg, IntrinsicKind::kLogOdds, 1.0, 42);
  RolloutBuffer b1, b2;
  c1.collect(policy, b1);
  c2.collect(policy, b2);
  CHECK(b1.obs == b2.obs);
  CHECK(b1.action == b2.action);
  CHECK(b1.log_prob == b2.log_prob);
  CHECK(b1.r_ext == b2.r_ext);
  CHECK(b1.r_int == b2.r_int);
  CHECK(b1.z == b2.z);
  CHECK(b1.done == b2.done);

  // balanced round-robin: completed-episode counts per code differ by <= 1
  std::map<std::size_t, std::size_t> counts;
  for (const auto& ep : b1.episodes) counts[ep.z] += 1;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (std::size_t z = 0; z < cfg.n_z; ++z) {
    lo = std::min(lo, counts[z]);
    hi = std::max(hi, counts[z]);
  }
  CHECK(hi - lo <= 1);

  // every episode segment carries exactly one z
  for (std::size_t e = 0; e < b1.n_envs; ++e) {
    std::size_t current = b1.z[e * b1.n_steps];
    for (std::size_t t = 1; t < b1.n_steps; ++t) {
      const std::size_t i = e * b1.n_steps + t;
      if (b1.done[i - 1]) current = b1.z[i];
      CHECK(b1.z[i] == current);
    }
  }
}

TEST_CASE("rollout intrinsic rewards match the frozen-discriminator formulas") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_z = 3;
  cfg.n_envs = 2;
  cfg.n_steps = 40;
  resolve_config(cfg);
  Rng prng(8);
  const LatentPolicy policy = make_latent_policy(
      11, 8, cfg.n_z, cfg.hidden, cfg.activation, prng);

  cfg.absorbing_diversity = 0;
  cfg.disc_obs_noise = 0.0;  // exact formula comparison below
  cfg.disc_smoothing = 0.0;
  for (IntrinsicKind kind : {IntrinsicKind::kLogOdds, IntrinsicKind::kMutualInfo}) {
    const double scale = kind == IntrinsicKind::kMutualInfo ? 0.1 : 1.0;
    RolloutCollector collector(cfg, kind, scale, 99);
    RolloutBuffer buffer;
    collector.collect(policy, buffer);
    for (std::size_t i = 0; i < buffer.total_steps(); ++i) {
      EnvObs next;
      next.features.assign(buffer.next_obs.begin() + i * buffer.obs_dim,
                           buffer.next_obs.begin() + (i + 1) * buffer.obs_dim);
      const auto q = discriminator_probs(policy, next);
      const double expect =
          scale * (kind == IntrinsicKind::kLogOdds
                       ? intrinsic_reward(q, buffer.z[i])
                       : diayn_reward(q, buffer.z[i], cfg.n_z));
      CHECK(buffer.r_int[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  // with absorption, an early-terminated episode's final intrinsic reward
  // carries the discounted tail of horizon steps at the terminal state
  {
    ExperimentConfig acfg = cfg;
    acfg.absorbing_diversity = 1;
    // bias the actor hard toward east so episodes terminate at goal (1, 0)
    LatentPolicy beeline = policy;
    const std::size_t last_layer = beeline.actor.spec.hidden.size();
    beeline.actor.params.block_data("layer" + std::to_string(last_layer) +
                                    ".bias")[0] += 50.0;
    RolloutCollector plain(cfg, IntrinsicKind::kLogOdds, 1.0, 99);
    RolloutCollector absorbing(acfg, IntrinsicKind::kLogOdds, 1.0, 99);
    RolloutBuffer pb, ab;
    plain.collect(beeline, pb);
    absorbing.collect(beeline, ab);
    REQUIRE(pb.action == ab.action);  // same stream, same trajectories
    const auto env = make_env(cfg.env);
    const double baseline = env->terminal_intrinsic_baseline();
    std::size_t terminals_checked = 0;
    for (std::size_t e = 0; e < pb.n_envs; ++e) {
      std::size_t ep_len = 0;
      for (std::size_t t = 0; t < pb.n_steps; ++t) {
        const std::size_t i = e * pb.n_steps + t;
        ep_len += 1;
        if (!pb.done[i]) {
          CHECK(ab.r_int[i] == pb.r_int[i]);
          continue;
        }
        double tail = 0.0, g = 1.0;
        for (std::size_t k = ep_len; k < env->horizon(); ++k) {
          g *= cfg.gamma;
          tail += g;
        }
        CHECK(ab.r_int[i] ==
              doctest::Approx(pb.r_int[i] + (pb.r_int[i] - baseline) * tail)
                  .epsilon(1e-12));
        if (ep_len < env->horizon()) ++terminals_checked;
        ep_len = 0;
      }
    }
    CHECK(terminals_checked > 0);
  }

  // n_z = 1 degenerates to a plain PPO buffer: no intrinsic signal
  ExperimentConfig mono = cfg;
  mono.n_z = 1;
  mono.resolved = false;
  mono.delta = 0.0;
  mono.r_target = 0.0;
  resolve_config(mono);
  Rng prng1(8);
  const LatentPolicy p1 =
      make_latent_policy(11, 8, 1, mono.hidden, mono.activation, prng1);
  RolloutCollector collector(mono, IntrinsicKind::kLogOdds, 1.0, 99);
  RolloutBuffer buffer;
  collector.collect(p1, buffer);
  for (std::size_t i = 0; i < buffer.total_steps(); ++i) {
    CHECK(buffer.r_int[i] == 0.0);
    CHECK(buffer.z[i] == 0);
  }
}

TEST_CASE("clipped surrogate gradient obeys the clip limits") {
  // ratios at 1 flow through the unclipped branch
  CHECK(clipped_surrogate_grad(2.0, 0.0, 0.2) == doctest::Approx(-2.0));
  // positive advantage, ratio beyond 1+eps: no gradient
  CHECK(clipped_surrogate_grad(2.0, std::log(1.3), 0.2) == 0.0);
  // negative advantage, ratio below 1-eps: no gradient
  CHECK(clipped_surrogate_grad(-2.0, std::log(0.7), 0.2) == 0.0);
  // clip_eps = 0 degenerates: any profitable movement is clipped
  CHECK(clipped_surrogate_grad(1.0, 1e-12, 0.0) == 0.0);
  CHECK(clipped_surrogate_grad(-1.0, -1e-12, 0.0) == 0.0);
  // unprofitable direction still carries gradient
  CHECK(clipped_surrogate_grad(1.0, std::log(0.5), 0.2) ==
        doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("ppo_update: unit ratios make the surrogate the mean advantage") {
  ExperimentConfig cfg = tiny_config();
  cfg.learning_rate = 0.0;  // freeze parameters so ratios stay exactly 1
  cfg.epochs = 1;
  cfg.minibatches = 1;
  cfg.entropy_coef = 0.0;
  resolve_config(cfg);
  Trainer trainer(cfg);

  RolloutCollector collector(cfg, IntrinsicKind::kLogOdds, 1.0, 7);
  RolloutBuffer buffer;
  collector.collect(trainer.policy(), buffer);

  std::vector<double> advantages(buffer.total_steps());
  Rng rng(4);
  double mean = 0.0;
  for (double& a : advantages) {
    a = rng.uniform(-2.0, 2.0);
    mean += a;
  }
  mean /= static_cast<double>(advantages.size());
  const std::vector<double> zeros(buffer.total_steps(), 0.0);

  const auto res = trainer.ppo_update(buffer, advantages, zeros, zeros);
  CHECK(res.policy_loss == doctest::Approx(-mean).epsilon(1e-9));
}

TEST_CASE("ppo_update raises the log-prob of a positively advantaged action") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_envs = 1;
  cfg.n_steps = 1;
  cfg.epochs = 1;
  cfg.minibatches = 1;
  cfg.entropy_coef = 0.0;
  cfg.learning_rate = 1e-3;
  resolve_config(cfg);
  Trainer trainer(cfg);

  RolloutCollector collector(cfg, IntrinsicKind::kLogOdds, 1.0, 31);
  RolloutBuffer buffer;
  collector.collect(trainer.policy(), buffer);
  REQUIRE(buffer.total_steps() == 1);

  EnvObs obs;
  obs.features.assign(buffer.obs.begin(), buffer.obs.begin() + buffer.obs_dim);
  const double lp_before = categorical_log_prob(
      actor_logits(trainer.policy(), obs, buffer.z[0]), buffer.action[0]);

  trainer.ppo_update(buffer, {1.0}, {0.0}, {0.0});

  const double lp_after = categorical_log_prob(
      actor_logits(trainer.policy(), obs, buffer.z[0]), buffer.action[0]);
  CHECK(lp_after >= lp_before);
}

TEST_CASE("discriminator_update drives losses to their information limits") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_z = 2;
  cfg.epochs = 10;
  cfg.minibatches = 4;
  cfg.learning_rate = 3e-3;
  resolve_config(cfg);

  // labels independent of states: loss converges to ln(n_z)
  {
    Trainer trainer(cfg);
    RolloutBuffer buffer;
    buffer.n_envs = 1;
    buffer.n_steps = 128;
    buffer.obs_dim = 11;
    buffer.obs.assign(128 * 11, 0.25);  // identical states
    for (int i = 0; i < 128; ++i) buffer.z.push_back(i % 2);
    double loss = 0.0;
    for (int round = 0; round < 30; ++round) {
      loss = trainer.discriminator_update(buffer);
      CHECK(loss >= 0.0);
    }
    CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(0.02));
  }

  // separable states: loss approaches zero
  {
    Trainer trainer(cfg);
    RolloutBuffer buffer;
    buffer.n_envs = 1;
    buffer.n_steps = 128;
    buffer.obs_dim = 11;
    Rng rng(2);
    for (int i = 0; i < 128; ++i) {
      const std::size_t z = i % 2;
      for (int k = 0; k < 11; ++k) {
        buffer.obs.push_back((z == 0 ? -0.8 : 0.8) + rng.uniform(-0.1, 0.1));
      }
      buffer.z.push_back(z);
    }
    double loss = 1.0;
    for (int round = 0; round < 60; ++round) {
      loss = trainer.discriminator_update(buffer);
    }
    CHECK(loss <= 0.05);
  }
}

TEST_CASE("train smoke run produces finite stats and runs every iteration") {
  ExperimentConfig cfg = tiny_config();
  std::vector<TrainStats> history;
  train(cfg, [&](const Trainer&, const TrainStats& stats) {
    history.push_back(stats);
    return true;
  });
  REQUIRE(history.size() == cfg.iterations);
  for (const TrainStats& s : history) {
    CHECK(std::isfinite(s.policy_loss));
    CHECK(std::isfinite(s.value_loss_ex));
    CHECK(std::isfinite(s.value_loss_in));
    CHECK(std::isfinite(s.discriminator_loss));
    CHECK(std::isfinite(s.entropy));
  }
}

TEST_CASE("ppo mode forces masks and zeroes the intrinsic stream") {
  ExperimentConfig cfg = tiny_config();
  cfg.algo = Algo::kPpo;
  cfg.n_z = 4;
  std::vector<TrainStats> history;
  Trainer trainer(cfg);
  for (int i = 0; i < 2; ++i) history.push_back(trainer.run_iteration());
  for (const TrainStats& s : history) {
    CHECK(s.mask_d);
    CHECK_FALSE(s.mask_r);
    CHECK(s.discriminator_loss == 0.0);
    CHECK(s.mean_int_return == 0.0);
  }
  for (double r : trainer.last_buffer().r_int) CHECK(r == 0.0);
}

TEST_CASE("diayn mode keeps both masks on; smerl starts with mask_r off") {
  ExperimentConfig cfg = tiny_config();
  cfg.algo = Algo::kDiayn;
  {
    Trainer trainer(cfg);
    const TrainStats s = trainer.run_iteration();
    CHECK(s.mask_d);
    CHECK(s.mask_r);
  }
  cfg.algo = Algo::kSmerl;
  {
    Trainer trainer(cfg);
    const TrainStats s = trainer.run_iteration();
    CHECK(s.mask_d);
    CHECK_FALSE(s.mask_r);  // untrained policy is far below R_target
  }
  // dgpo itself starts in stage 1: diversity unsatisfied
  cfg.algo = Algo::kDgpo;
  {
    Trainer trainer(cfg);
    const TrainStats s = trainer.run_iteration();
    CHECK_FALSE(s.mask_d);
  }
}

TEST_CASE("full-loop determinism: identical configs give identical stats") {
  ExperimentConfig cfg = tiny_config();
  cfg.iterations = 3;
  auto run = [&] {
    std::vector<TrainStats> history;
    train(cfg, [&](const Trainer&, const TrainStats& s) {
      history.push_back(s);
      return true;
    });
    return history;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].policy_loss == b[i].policy_loss);
    CHECK(a[i].value_loss_ex == b[i].value_loss_ex);
    CHECK(a[i].value_loss_in == b[i].value_loss_in);
    CHECK(a[i].discriminator_loss == b[i].discriminator_loss);
    CHECK(a[i].entropy == b[i].entropy);
    CHECK(a[i].mean_ext_return == b[i].mean_ext_return);
    CHECK(a[i].j_div_ema == b[i].j_div_ema);
  }
}

TEST_CASE("per-latent gates track codes independently") {
  ExperimentConfig cfg = tiny_config();
  cfg.per_latent_gates = true;
  cfg.n_z = 2;
  Trainer trainer(cfg);
  trainer.run_iteration();
  REQUIRE(trainer.gates().size() == 2);
}
