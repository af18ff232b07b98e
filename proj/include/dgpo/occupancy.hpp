#pragma once

#include <cstdint>
#include <functional>

#include "dgpo/env.hpp"
#include "dgpo/latent_policy.hpp"
#include "dgpo/rng.hpp"

namespace dgpo {

struct OccupancyDivergence {
  double div_estimate = 0.0;          // E_z[min_{z'!=z} KL(rho(.|z) || rho(.|z'))]
  double lower_bound_estimate = 0.0;  // E_{z,s}[min_{z'!=z} ln p(z|s)/(p(z|s)+p(z'|s))]
};

// Chooses an action for (obs, z); lets tests drive the oracle with
// hand-crafted behaviors.
using LatentActionFn =
    std::function<std::size_t(const EnvObs& obs, std::size_t z, Rng& rng)>;

// Monte-Carlo estimate of the pairwise-minimum occupancy divergence and of
// its discriminator-free lower bound, on a discrete-state environment.
// Discounted visitation counts per latent are smoothed additively (1e-3 per
// state) before normalization; posteriors p(z|s) come from the same counts
// with a uniform prior. Only gridworld environments are accepted.
OccupancyDivergence occupancy_kl_oracle(const LatentActionFn& act_fn,
                                        EnvKind kind, std::size_t n_z,
                                        std::size_t n_episodes, double gamma,
                                        Rng& rng);

// Same oracle driven by a latent policy's stochastic action sampling.
OccupancyDivergence occupancy_kl_oracle(const LatentPolicy& policy,
                                        EnvKind kind, std::size_t n_episodes,
                                        double gamma, Rng& rng);

}  // namespace dgpo
