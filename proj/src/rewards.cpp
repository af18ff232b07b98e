#include "dgpo/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgpo {

namespace {
constexpr double kProbFloor = 1e-8;
}

double intrinsic_reward(const std::vector<double>& q_probs, std::size_t z) {
  if (q_probs.empty() || z >= q_probs.size()) {
    throw std::invalid_argument("intrinsic_reward: bad latent index");
  }
  if (q_probs.size() == 1) return 0.0;  // no competing code

  const double qz = std::max(q_probs[z], kProbFloor);
  double strongest = -1.0;
  for (std::size_t i = 0; i < q_probs.size(); ++i) {
    if (i == z) continue;
    strongest = std::max(strongest, std::max(q_probs[i], kProbFloor));
  }
  // The minimum over competitors is attained at the largest q(z').
  return std::log(qz / (qz + strongest));
}

double diayn_reward(const std::vector<double>& q_probs, std::size_t z,
                    std::size_t n_z) {
  if (q_probs.size() != n_z || z >= n_z) {
    throw std::invalid_argument("diayn_reward: bad latent index");
  }
  return std::log(std::max(q_probs[z], kProbFloor)) +
         std::log(static_cast<double>(n_z));
}

}  // namespace dgpo
