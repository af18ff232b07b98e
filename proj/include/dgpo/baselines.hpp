#pragma once

#include <cstdint>

#include "dgpo/env.hpp"

namespace dgpo {

// Mean discounted return of a uniform-random policy, for range-normalized
// thresholds. Deterministic for a fixed seed.
double random_policy_discounted_return(EnvKind kind, std::size_t n_episodes,
                                       double gamma, std::uint64_t seed);

}  // namespace dgpo
