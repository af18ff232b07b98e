#include "dgpo/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dgpo/distributions.hpp"
#include "dgpo/gae.hpp"

namespace dgpo {

namespace {

struct ModeTraits {
  IntrinsicKind intrinsic = IntrinsicKind::kLogOdds;
  double scale = 1.0;
  int force_d = -1;  // -1 dynamic, 0/1 forced
  int force_r = -1;
};

ModeTraits mode_traits(const ExperimentConfig& cfg) {
  switch (cfg.algo) {
    case Algo::kDgpo:
      return {IntrinsicKind::kLogOdds, 1.0, -1, -1};
    case Algo::kPpo:
      return {IntrinsicKind::kZero, 0.0, 1, 0};
    case Algo::kDiayn:
      // r_total = r_ext + alpha * r_diayn, always
      return {IntrinsicKind::kMutualInfo, cfg.alpha, 1, 1};
    case Algo::kSmerl:
      // intrinsic mixed in only once the return target is met
      return {IntrinsicKind::kMutualInfo, cfg.alpha, 1, -1};
    case Algo::kDgpoNoStage1:
      return {IntrinsicKind::kLogOdds, 1.0, 1, -1};
    case Algo::kDgpoNoStage2:
      return {IntrinsicKind::kLogOdds, 1.0, -1, 0};
    case Algo::kDgpoMiMetric:
      // same mixing scale as the other mutual-information modes
      return {IntrinsicKind::kMutualInfo, cfg.alpha, -1, -1};
  }
  throw std::logic_error("mode_traits: bad algo");
}

void clip_grad_norm(ParamVector& grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads.values) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : grads.values) g *= scale;
  }
}

// Nearly equal minibatch split boundaries.
std::vector<std::size_t> minibatch_bounds(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  for (std::size_t p = 1; p <= parts; ++p) {
    bounds.push_back(n * p / parts);
  }
  return bounds;
}

}  // namespace

double clipped_surrogate_grad(double advantage, double log_ratio,
                              double clip_eps) {
  // no gradient once the ratio is clipped in the profitable direction
  if (advantage > 0.0 && log_ratio > std::log1p(clip_eps)) return 0.0;
  if (advantage < 0.0 && clip_eps < 1.0 && log_ratio < std::log1p(-clip_eps)) {
    return 0.0;
  }
  return -advantage * std::exp(log_ratio);
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std_dev = std::sqrt(var / n);
  const double denom = std_dev + 1e-8;
  for (double& a : advantages) a = (a - mean) / denom;
}

Trainer::Trainer(const ExperimentConfig& cfg)
    : cfg_([&] {
        ExperimentConfig c = cfg;
        resolve_config(c);
        return c;
      }()),
      rng_(cfg_.seed),
      policy_([&] {
        const auto probe = make_env(cfg_.env);
        return make_latent_policy(probe->obs_dim(), probe->n_actions(),
                                  cfg_.n_z, cfg_.hidden, cfg_.activation, rng_,
                                  cfg_.latent_init_gain);
      }()),
      opt_actor_(make_adam_state(policy_.actor.params.size(), cfg_.learning_rate)),
      opt_critic_ex_(make_adam_state(policy_.critic_ex.params.size(), cfg_.learning_rate)),
      opt_critic_in_(make_adam_state(policy_.critic_in.params.size(), cfg_.learning_rate)),
      opt_disc_(make_adam_state(policy_.discriminator.params.size(),
                                cfg_.learning_rate * cfg_.disc_lr_scale)),
      collector_(cfg_, mode_traits(cfg_).intrinsic, mode_traits(cfg_).scale,
                 cfg_.seed ^ 0x9e3779b97f4a7c15ULL) {
  const std::size_t n_gates = cfg_.per_latent_gates ? cfg_.n_z : 1;
  const double h_d = cfg_.hysteresis_frac * std::fabs(cfg_.delta);
  const double h_r = cfg_.hysteresis_frac * std::fabs(cfg_.r_target);
  gates_.assign(n_gates, make_gate_state(cfg_.delta, cfg_.r_target,
                                         cfg_.ema_momentum, h_d, h_r));
  apply_forced_masks();
}

void Trainer::apply_forced_masks() {
  const ModeTraits mode = mode_traits(cfg_);
  for (GateState& g : gates_) {
    if (mode.force_d >= 0) g.mask_d = mode.force_d != 0;
    if (mode.force_r >= 0) g.mask_r = mode.force_r != 0;
  }
}

TrainStats Trainer::run_iteration() {
  const auto started = std::chrono::steady_clock::now();
  iteration_ += 1;

  TrainStats stats;
  stats.iteration = iteration_;

  collector_.collect(policy_, buffer_);
  const std::size_t n = buffer_.total_steps();

  // gate updates from completed-episode discounted returns
  if (cfg_.per_latent_gates) {
    bool any = false;
    for (std::size_t z = 0; z < cfg_.n_z; ++z) {
      std::vector<double> ext, in;
      for (const auto& ep : buffer_.episodes) {
        if (ep.z != z) continue;
        ext.push_back(ep.discounted_ext);
        in.push_back(ep.discounted_int);
      }
      any = update_gates(gates_[z], ext, in) || any;
    }
    stats.gates_updated = any;
  } else {
    std::vector<double> ext, in;
    ext.reserve(buffer_.episodes.size());
    in.reserve(buffer_.episodes.size());
    for (const auto& ep : buffer_.episodes) {
      ext.push_back(ep.discounted_ext);
      in.push_back(ep.discounted_int);
    }
    stats.gates_updated = update_gates(gates_[0], ext, in);
  }
  apply_forced_masks();

  // Eq. 15 reward composition and total value, per step
  std::vector<double> r_total(n), v_total(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GateState& g = gate_for(buffer_.z[i]);
    const GateCoefficients c = gate_coefficients(g.mask_d, g.mask_r);
    r_total[i] = c.ext * buffer_.r_ext[i] + c.in * buffer_.r_int[i];
    v_total[i] = buffer_.v_ex[i] + buffer_.v_in[i];
  }

  // GAE per environment segment: advantages over the composed stream,
  // lambda-return targets per critic stream, gated per Eq. 13
  std::vector<double> advantages(n), target_ex(n), target_in(n);
  const std::size_t steps = buffer_.n_steps;
  for (std::size_t e = 0; e < buffer_.n_envs; ++e) {
    const std::size_t lo = e * steps;
    auto slice = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + lo, v.begin() + lo + steps);
    };
    const std::vector<std::uint8_t> dones(buffer_.done.begin() + lo,
                                          buffer_.done.begin() + lo + steps);

    const GaeResult total =
        compute_gae(slice(r_total), slice(v_total), dones,
                    buffer_.bootstrap_ex[e] + buffer_.bootstrap_in[e],
                    cfg_.gamma, cfg_.gae_lambda);
    const GaeResult ext =
        compute_gae(slice(buffer_.r_ext), slice(buffer_.v_ex), dones,
                    buffer_.bootstrap_ex[e], cfg_.gamma, cfg_.gae_lambda);
    const GaeResult intr =
        compute_gae(slice(buffer_.r_int), slice(buffer_.v_in), dones,
                    buffer_.bootstrap_in[e], cfg_.gamma, cfg_.gae_lambda);

    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t i = lo + t;
      const GateState& g = gate_for(buffer_.z[i]);
      const GateCoefficients c = gate_coefficients(g.mask_d, g.mask_r);
      advantages[i] = total.advantages[t];
      target_ex[i] = c.ext * ext.returns[t];
      target_in[i] = c.in * intr.returns[t];
    }
  }

  normalize_advantages(advantages);

  const UpdateResult upd = ppo_update(buffer_, advantages, target_ex, target_in);
  stats.policy_loss = upd.policy_loss;
  stats.value_loss_ex = upd.value_loss_ex;
  stats.value_loss_in = upd.value_loss_in;
  stats.entropy = upd.entropy;

  if (mode_traits(cfg_).intrinsic != IntrinsicKind::kZero && cfg_.n_z > 1) {
    stats.discriminator_loss = discriminator_update(buffer_);
  }

  stats.episodes = buffer_.episodes.size();
  if (!buffer_.episodes.empty()) {
    double ext_sum = 0.0, int_sum = 0.0;
    for (const auto& ep : buffer_.episodes) {
      ext_sum += ep.undiscounted_ext;
      int_sum += ep.discounted_int;
    }
    stats.mean_ext_return = ext_sum / static_cast<double>(buffer_.episodes.size());
    stats.mean_int_return = int_sum / static_cast<double>(buffer_.episodes.size());
  }

  // reported masks: conjunction across per-latent gates, EMA means
  bool all_d = true, all_r = true;
  double jext = 0.0, jdiv = 0.0;
  for (const GateState& g : gates_) {
    all_d = all_d && g.mask_d;
    all_r = all_r && g.mask_r;
    jext += g.j_ext_ema;
    jdiv += g.j_div_ema;
  }
  stats.mask_d = all_d;
  stats.mask_r = all_r;
  stats.j_ext_ema = jext / static_cast<double>(gates_.size());
  stats.j_div_ema = jdiv / static_cast<double>(gates_.size());

  stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return stats;
}

Trainer::UpdateResult Trainer::ppo_update(const RolloutBuffer& buffer,
                                          const std::vector<double>& advantages,
                                          const std::vector<double>& target_ex,
                                          const std::vector<double>& target_in) {
  const std::size_t n = buffer.total_steps();
  if (advantages.size() != n || target_ex.size() != n || target_in.size() != n) {
    throw std::invalid_argument("ppo_update: array length mismatch");
  }

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), (std::size_t)0);
  const auto bounds = minibatch_bounds(n, cfg_.minibatches);

  ParamVector g_actor = make_param_vector(policy_.actor.params.layout);
  ParamVector g_ce = make_param_vector(policy_.critic_ex.params.layout);
  ParamVector g_ci = make_param_vector(policy_.critic_in.params.layout);
  MlpWorkspace ws_actor, ws_ce, ws_ci;
  MlpScratch scratch;
  std::vector<double> input(policy_.obs_dim + policy_.n_z, 0.0);
  std::vector<double> dlogits(policy_.n_actions);
  std::vector<double> probs(policy_.n_actions);

  UpdateResult res;
  double loss_count = 0.0;

  for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    // Fisher-Yates shuffle on the trainer stream
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng_.uniform_int(i + 1));
      std::swap(indices[i], indices[j]);
    }

    for (std::size_t mb = 0; mb + 1 < bounds.size(); ++mb) {
      const std::size_t lo = bounds[mb], hi = bounds[mb + 1];
      if (lo == hi) continue;
      const double inv_mb = 1.0 / static_cast<double>(hi - lo);

      std::fill(g_actor.values.begin(), g_actor.values.end(), 0.0);
      std::fill(g_ce.values.begin(), g_ce.values.end(), 0.0);
      std::fill(g_ci.values.begin(), g_ci.values.end(), 0.0);

      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t i = indices[k];
        const double* obs = buffer.obs_at(i);
        std::copy(obs, obs + buffer.obs_dim, input.begin());
        std::fill(input.begin() + buffer.obs_dim, input.end(), 0.0);
        input[buffer.obs_dim + buffer.z[i]] = 1.0;

        // actor
        mlp_forward_ws(policy_.actor.spec, policy_.actor.params, input.data(),
                       ws_actor);
        const std::vector<double>& logits = ws_actor.acts.back();
        double max_logit = logits[0];
        for (double l : logits) max_logit = l > max_logit ? l : max_logit;
        double sum = 0.0;
        for (std::size_t a = 0; a < logits.size(); ++a) {
          probs[a] = std::exp(logits[a] - max_logit);
          sum += probs[a];
        }
        const double lse = max_logit + std::log(sum);
        for (double& p : probs) p /= sum;

        const std::size_t action = buffer.action[i];
        const double log_prob_new = logits[action] - lse;
        const double log_ratio = log_prob_new - buffer.log_prob[i];
        const double adv = advantages[i];

        double entropy = 0.0;
        for (std::size_t a = 0; a < logits.size(); ++a) {
          entropy -= probs[a] * (logits[a] - lse);
        }
        res.entropy += entropy;

        // surrogate loss value for stats (ratio capped to keep logs finite)
        {
          const double ratio = std::exp(std::min(log_ratio, 50.0));
          const double clipped =
              std::min(std::max(ratio, 1.0 - cfg_.clip_eps), 1.0 + cfg_.clip_eps);
          res.policy_loss += -std::min(ratio * adv, clipped * adv);
        }

        const double g_lp =
            clipped_surrogate_grad(adv, log_ratio, cfg_.clip_eps) * inv_mb;
        for (std::size_t a = 0; a < logits.size(); ++a) {
          const double indicator = a == action ? 1.0 : 0.0;
          const double dH = -probs[a] * (logits[a] - lse + entropy);
          dlogits[a] = g_lp * (indicator - probs[a]) -
                       cfg_.entropy_coef * inv_mb * dH;
        }
        mlp_backward_ws(policy_.actor.spec, policy_.actor.params, ws_actor,
                        dlogits.data(), g_actor, nullptr, scratch);

        // critics, Eq. 13 MSE toward the gated targets
        mlp_forward_ws(policy_.critic_ex.spec, policy_.critic_ex.params,
                       input.data(), ws_ce);
        const double v_ex = ws_ce.acts.back()[0];
        const double diff_ex = v_ex - target_ex[i];
        res.value_loss_ex += diff_ex * diff_ex;
        const double dv_ex = cfg_.value_coef * 2.0 * diff_ex * inv_mb;
        mlp_backward_ws(policy_.critic_ex.spec, policy_.critic_ex.params, ws_ce,
                        &dv_ex, g_ce, nullptr, scratch);

        mlp_forward_ws(policy_.critic_in.spec, policy_.critic_in.params,
                       input.data(), ws_ci);
        const double v_in = ws_ci.acts.back()[0];
        const double diff_in = v_in - target_in[i];
        res.value_loss_in += diff_in * diff_in;
        const double dv_in = cfg_.value_coef * 2.0 * diff_in * inv_mb;
        mlp_backward_ws(policy_.critic_in.spec, policy_.critic_in.params, ws_ci,
                        &dv_in, g_ci, nullptr, scratch);

        loss_count += 1.0;
      }

      clip_grad_norm(g_actor, cfg_.max_grad_norm);
      clip_grad_norm(g_ce, cfg_.max_grad_norm);
      clip_grad_norm(g_ci, cfg_.max_grad_norm);
      adam_step(opt_actor_, policy_.actor.params, g_actor);
      adam_step(opt_critic_ex_, policy_.critic_ex.params, g_ce);
      adam_step(opt_critic_in_, policy_.critic_in.params, g_ci);
    }
  }

  if (loss_count > 0.0) {
    res.policy_loss /= loss_count;
    res.value_loss_ex /= loss_count;
    res.value_loss_in /= loss_count;
    res.entropy /= loss_count;
  }
  if (!std::isfinite(res.policy_loss) || !std::isfinite(res.value_loss_ex) ||
      !std::isfinite(res.value_loss_in)) {
    throw std::runtime_error("ppo_update: non-finite loss");
  }
  return res;
}

double Trainer::discriminator_update(const RolloutBuffer& buffer) {
  const std::size_t n = buffer.total_steps();
  if (n == 0) throw std::invalid_argument("discriminator_update: empty buffer");

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), (std::size_t)0);
  const auto bounds = minibatch_bounds(n, cfg_.minibatches);

  ParamVector grads = make_param_vector(policy_.discriminator.params.layout);
  MlpWorkspace ws;
  MlpScratch scratch;
  std::vector<double> dlogits(policy_.n_z);
  std::vector<double> noisy_obs(buffer.obs_dim);

  double loss_sum = 0.0;
  double loss_count = 0.0;

  for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng_.uniform_int(i + 1));
      std::swap(indices[i], indices[j]);
    }
    for (std::size_t mb = 0; mb + 1 < bounds.size(); ++mb) {
      const std::size_t lo = bounds[mb], hi = bounds[mb + 1];
      if (lo == hi) continue;
      const double inv_mb = 1.0 / static_cast<double>(hi - lo);
      std::fill(grads.values.begin(), grads.values.end(), 0.0);

      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t i = indices[k];
        const double* disc_in = buffer.obs_at(i);
        if (cfg_.disc_obs_noise > 0.0) {
          const double* raw = buffer.obs_at(i);
          for (std::size_t f = 0; f < buffer.obs_dim; ++f) {
            noisy_obs[f] = raw[f] + cfg_.disc_obs_noise * rng_.normal();
          }
          disc_in = noisy_obs.data();
        }
        mlp_forward_ws(policy_.discriminator.spec, policy_.discriminator.params,
                       disc_in, ws);
        const std::vector<double>& logits = ws.acts.back();
        double max_logit = logits[0];
        for (double l : logits) max_logit = l > max_logit ? l : max_logit;
        double sum = 0.0;
        for (double l : logits) sum += std::exp(l - max_logit);
        const double lse = max_logit + std::log(sum);

        const std::size_t label = buffer.z[i];
        loss_sum += lse - logits[label];
        loss_count += 1.0;

        for (std::size_t c = 0; c < dlogits.size(); ++c) {
          const double p = std::exp(logits[c] - lse);
          dlogits[c] = (p - (c == label ? 1.0 : 0.0)) * inv_mb;
        }
        mlp_backward_ws(policy_.discriminator.spec,
                        policy_.discriminator.params, ws, dlogits.data(), grads,
                        nullptr, scratch);
      }

      clip_grad_norm(grads, cfg_.max_grad_norm);
      adam_step(opt_disc_, policy_.discriminator.params, grads);
    }
  }
  return loss_count > 0.0 ? loss_sum / loss_count : 0.0;
}

LatentPolicy train(const ExperimentConfig& cfg, const IterationCallback& cb) {
  Trainer trainer(cfg);
  for (std::size_t it = 0; it < trainer.config().iterations; ++it) {
    const TrainStats stats = trainer.run_iteration();
    if (cb && !cb(trainer, stats)) break;
  }
  return trainer.policy();
}

}  // namespace dgpo
