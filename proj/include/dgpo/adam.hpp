#pragma once

#include <cstddef>
#include <vector>

#include "dgpo/param_vector.hpp"

namespace dgpo {

// Bias-corrected adaptive-moment optimizer state for one parameter vector.
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step_count = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(std::size_t param_count, double lr,
                          double beta1 = 0.9, double beta2 = 0.999,
                          double eps = 1e-8);

// In-place update: params -= lr * m_hat / (sqrt(v_hat) + eps).
// Throws on length mismatch; a non-finite gradient component raises an error
// naming the parameter block it falls in.
void adam_step(AdamState& state, ParamVector& params, const ParamVector& grads);

}  // namespace dgpo
