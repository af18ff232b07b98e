#include "dgpo/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace dgpo {

AdamState make_adam_state(std::size_t param_count, double lr, double beta1,
                          double beta2, double eps) {
  AdamState s;
  s.first_moment.assign(param_count, 0.0);
  s.second_moment.assign(param_count, 0.0);
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

namespace {

// Name of the block containing flat index i, for error messages.
std::string block_name_at(const ParamVector& params, std::size_t i) {
  std::size_t offset = 0;
  for (const BlockShape& b : params.layout) {
    if (i < offset + b.size()) return b.name;
    offset += b.size();
  }
  return "<unknown>";
}

}  // namespace

void adam_step(AdamState& state, ParamVector& params,
               const ParamVector& grads) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.first_moment.size() != n) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads.values[i])) {
      throw std::runtime_error("adam_step: non-finite gradient in block '" +
                               block_name_at(grads, i) + "'");
    }
  }

  state.step_count += 1;
  const double b1corr =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double b2corr =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  double* p = params.values.data();
  const double* g = grads.values.data();
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
    const double m_hat = m[i] / b1corr;
    const double v_hat = v[i] / b2corr;
    p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace dgpo
