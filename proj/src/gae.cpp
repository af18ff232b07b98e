#include "dgpo/gae.hpp"

#include <stdexcept>

namespace dgpo {

GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values,
                      const std::vector<std::uint8_t>& dones,
                      double bootstrap_value, double gamma, double lambda) {
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("compute_gae: gamma and lambda must be in [0, 1]");
  }
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::invalid_argument("compute_gae: array length mismatch");
  }

  GaeResult res;
  res.advantages.assign(n, 0.0);
  res.returns.assign(n, 0.0);

  double last_gae = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const bool terminal = dones[i] != 0;
    const double next_value =
        terminal ? 0.0 : (i + 1 < n ? values[i + 1] : bootstrap_value);
    const double next_nonterminal = terminal ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value - values[i];
    last_gae = delta + gamma * lambda * next_nonterminal * last_gae;
    res.advantages[i] = last_gae;
    res.returns[i] = last_gae + values[i];
  }
  return res;
}

}  // namespace dgpo
