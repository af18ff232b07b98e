#pragma once

#include <cstdint>
#include <vector>

namespace dgpo {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values (lambda-returns)
};

// Generalized advantage estimation over one environment's contiguous step
// arrays. dones[t] marks a true terminal (no bootstrap across it);
// bootstrap_value is V(s_T) for a segment truncated mid-episode and is
// ignored when the final step is terminal. Throws unless gamma and lambda
// lie in [0, 1] and the arrays share one length.
GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones,
                      double bootstrap_value, double gamma, double lambda);

}  // namespace dgpo
