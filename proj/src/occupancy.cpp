#include "dgpo/occupancy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dgpo/distributions.hpp"
#include "dgpo/two_paths.hpp"

namespace dgpo {

OccupancyDivergence occupancy_kl_oracle(const LatentActionFn& act_fn,
                                        EnvKind kind, std::size_t n_z,
                                        std::size_t n_episodes, double gamma,
                                        Rng& rng) {
  if (kind != EnvKind::kTwoPaths) {
    throw std::invalid_argument(
        "occupancy_kl_oracle: only discrete-state gridworlds are supported");
  }
  if (n_z < 2) throw std::invalid_argument("occupancy_kl_oracle: n_z must be >= 2");
  if (n_episodes < 1) {
    throw std::invalid_argument("occupancy_kl_oracle: need at least 1 episode");
  }

  TwoPathsEnv env;
  const std::size_t n_states = TwoPathsEnv::n_states();
  constexpr double kSmoothing = 1e-3;

  // discounted visitation counts per latent; episodes that end early absorb
  // into their terminal state for the remaining horizon
  std::vector<std::vector<double>> counts(n_z,
                                          std::vector<double>(n_states, 0.0));
  for (std::size_t z = 0; z < n_z; ++z) {
    for (std::size_t ep = 0; ep < n_episodes; ++ep) {
      EnvObs obs = env.reset(ep);
      double discount = 1.0;
      counts[z][env.state_index()] += discount;
      std::size_t t = 0;
      bool done = false;
      for (; t < env.horizon(); ++t) {
        const StepResult step = env.step(act_fn(obs, z, rng));
        discount *= gamma;
        counts[z][env.state_index()] += discount;
        obs = step.obs;
        if (step.done) {
          done = true;
          break;
        }
      }
      if (done) {
        for (std::size_t k = t + 1; k < env.horizon(); ++k) {
          discount *= gamma;
          counts[z][env.state_index()] += discount;
        }
      }
    }
  }

  // additive smoothing, then normalize to rho(s|z)
  std::vector<std::vector<double>> rho(n_z, std::vector<double>(n_states, 0.0));
  for (std::size_t z = 0; z < n_z; ++z) {
    double total = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
      rho[z][s] = counts[z][s] + kSmoothing;
      total += rho[z][s];
    }
    for (double& v : rho[z]) v /= total;
  }

  OccupancyDivergence out;

  // DIV estimate: expected min pairwise KL between latent occupancies
  for (std::size_t z = 0; z < n_z; ++z) {
    double min_kl = std::numeric_limits<double>::infinity();
    for (std::size_t zp = 0; zp < n_z; ++zp) {
      if (zp == z) continue;
      double kl = 0.0;
      for (std::size_t s = 0; s < n_states; ++s) {
        kl += rho[z][s] * std::log(rho[z][s] / rho[zp][s]);
      }
      min_kl = std::min(min_kl, kl);
    }
    out.div_estimate += min_kl;
  }
  out.div_estimate /= static_cast<double>(n_z);

  // lower bound: E_{z, s~rho(.|z)}[min_{z'} ln p(z|s) / (p(z|s)+p(z'|s))]
  // with posteriors from the same smoothed counts and a uniform prior
  for (std::size_t z = 0; z < n_z; ++z) {
    double expectation = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
      double denom = 0.0;
      for (std::size_t zp = 0; zp < n_z; ++zp) denom += rho[zp][s];
      const double pz = rho[z][s] / denom;
      double min_term = std::numeric_limits<double>::infinity();
      for (std::size_t zp = 0; zp < n_z; ++zp) {
        if (zp == z) continue;
        const double pzp = rho[zp][s] / denom;
        min_term = std::min(min_term, std::log(pz / (pz + pzp)));
      }
      expectation += rho[z][s] * min_term;
    }
    out.lower_bound_estimate += expectation;
  }
  out.lower_bound_estimate /= static_cast<double>(n_z);
  return out;
}

OccupancyDivergence occupancy_kl_oracle(const LatentPolicy& policy,
                                        EnvKind kind, std::size_t n_episodes,
                                        double gamma, Rng& rng) {
  LatentActionFn fn = [&policy](const EnvObs& obs, std::size_t z, Rng& r) {
    std::vector<double> input;
    build_latent_input(obs, z, policy.n_z, input);
    const std::vector<double> logits =
        mlp_forward(policy.actor.spec, policy.actor.params, input);
    return categorical_sample(logits, r).index;
  };
  return occupancy_kl_oracle(fn, kind, policy.n_z, n_episodes, gamma, rng);
}

}  // namespace dgpo
