#pragma once

#include <cstddef>
#include <vector>

namespace dgpo {

// Diversity reward at the next state: the log-odds of the active latent code
// against its nearest competitor,
//   min over z' != z of ln( q(z) / (q(z) + q(z')) ).
// Probabilities are floored at 1e-8 before the ratio so a saturated
// discriminator cannot produce -inf. Always <= 0. With a single latent code
// there is no competitor and the reward is defined as 0 (the algorithm
// degenerates to plain PPO).
double intrinsic_reward(const std::vector<double>& q_probs, std::size_t z);

// Mutual-information reward with a uniform prior: ln q(z) + ln n_z.
double diayn_reward(const std::vector<double>& q_probs, std::size_t z,
                    std::size_t n_z);

}  // namespace dgpo
