#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dgpo/env.hpp"
#include "dgpo/mlp.hpp"

namespace dgpo {

enum class Algo {
  kDgpo,
  kPpo,
  kDiayn,
  kSmerl,
  kDgpoNoStage1,
  kDgpoNoStage2,
  kDgpoMiMetric,
};

std::string algo_name(Algo algo);
Algo algo_from_name(const std::string& name);

enum class LatentSampling { kRoundRobin, kIid };

// Full experiment configuration. Every field has a default; the config file
// and --set overrides may change any of them. Unknown keys are rejected.
struct ExperimentConfig {
  EnvKind env = EnvKind::kFourGoals;
  Algo algo = Algo::kDgpo;
  std::size_t n_z = 4;
  std::uint64_t seed = 1;
  std::size_t iterations = 500;

  // "auto" lets resolve_config pick the per-environment default
  static constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();

  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  std::size_t epochs = 4;
  std::size_t minibatches = 4;
  double entropy_coef = kAuto;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  double learning_rate = 3e-4;
  std::size_t n_envs = 16;
  std::size_t n_steps = 128;
  double alpha = kAuto;  // DIAYN / SMERL / MI-ablation mixing weight

  // Gate thresholds. delta_step is a per-step average converted to a
  // discounted-return bound; r_target_frac scales the environment oracle's
  // optimal discounted return. Explicit delta / r_target values override the
  // derived defaults when finite.
  double delta_step = kAuto;
  double delta_step_mi = 0.0;  // 0 -> resolved to 0.5 * ln(n_z)
  double delta = 0.0;          // resolved
  double r_target_frac = kAuto;
  double r_target = 0.0;  // resolved
  double ema_momentum = 0.9;
  double hysteresis_frac = 0.05;
  bool per_latent_gates = false;

  LatentSampling latent_sampling = LatentSampling::kRoundRobin;
  // Treat early-terminated episodes as absorbing into their final state for
  // the intrinsic stream, so shared terminal states cost diversity.
  // -1 auto: on when the environment admits distinct terminal outcomes,
  // off when every strategy must end at one common goal.
  int absorbing_diversity = -1;
  // Mix toward uniform applied to q(z|s) inside the trainer's reward path;
  // caps the repulsion a latent suffers for entering territory another code
  // already owns.
  double disc_smoothing = 0.02;
  // Gaussian noise on observations fed to the discriminator (training and
  // intrinsic-reward evaluation). Sets the spatial resolution below which
  // behaviors count as identical; without it the discriminator can tell
  // strategies apart by arbitrarily small positional offsets.
  double disc_obs_noise = kAuto;
  // Initial scale multiplier on the actor's latent-input weights; gives each
  // code a distinct behavioral bias so the discriminator can bootstrap.
  double latent_init_gain = 4.0;
  // Discriminator optimizer learning-rate multiplier over learning_rate.
  double disc_lr_scale = 3.0;
  std::vector<std::size_t> hidden = {32, 32};
  Activation activation = Activation::kTanh;

  std::size_t checkpoint_every = 100;
  std::size_t eval_every = 10;
  std::size_t eval_episodes = 8;

  std::string output_dir;
  bool resolved = false;
};

// Parses a "key = value" structured-text config file (# comments, blank
// lines allowed). Throws with the offending line on any unknown key or
// malformed value.
ExperimentConfig parse_config_file(const std::string& path);

// Applies one "key=value" override to cfg; throws on unknown key.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Fills the derived fields (delta, r_target, ...) from the environment
// oracle and validates ranges. Idempotent.
void resolve_config(ExperimentConfig& cfg);

// Serializes the resolved config back to key = value text (the run
// snapshot); parsing the snapshot reproduces the config exactly.
std::string config_to_text(const ExperimentConfig& cfg);

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<text>");

}  // namespace dgpo
