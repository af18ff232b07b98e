#include "dgpo/baselines.hpp"

#include "dgpo/rng.hpp"

namespace dgpo {

double random_policy_discounted_return(EnvKind kind, std::size_t n_episodes,
                                       double gamma, std::uint64_t seed) {
  const auto env = make_env(kind);
  Rng rng(seed);
  double total = 0.0;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    env->reset(ep);
    double discount = 1.0;
    for (std::size_t t = 0; t < env->horizon(); ++t) {
      const StepResult step =
          env->step(static_cast<std::size_t>(rng.uniform_int(env->n_actions())));
      total += discount * step.reward;
      discount *= gamma;
      if (step.done) break;
    }
  }
  return total / static_cast<double>(n_episodes);
}

}  // namespace dgpo
