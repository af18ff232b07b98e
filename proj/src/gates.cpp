#include "dgpo/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace dgpo {

GateState make_gate_state(double delta, double r_target, double ema_momentum,
                          double hysteresis_d, double hysteresis_r) {
  if (ema_momentum < 0.0 || ema_momentum >= 1.0) {
    throw std::invalid_argument("GateState: ema_momentum must be in [0, 1)");
  }
  if (hysteresis_d < 0.0 || hysteresis_r < 0.0) {
    throw std::invalid_argument("GateState: hysteresis must be >= 0");
  }
  GateState s;
  s.delta = delta;
  s.r_target = r_target;
  s.ema_momentum = ema_momentum;
  s.hysteresis_d = hysteresis_d;
  s.hysteresis_r = hysteresis_r;
  return s;
}

namespace {

double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

void update_ema(double& ema, bool& initialized, double momentum, double value) {
  if (!initialized) {
    ema = value;
    initialized = true;
  } else {
    ema = momentum * ema + (1.0 - momentum) * value;
  }
}

bool apply_hysteresis(bool current, double value, double threshold,
                      double hysteresis) {
  if (value >= threshold) return true;
  if (value < threshold - hysteresis) return false;
  return current;  // inside the band: hold
}

}  // namespace

bool update_gates(GateState& state,
                  const std::vector<double>& episode_ext_returns,
                  const std::vector<double>& episode_int_returns) {
  if (episode_ext_returns.empty() && episode_int_returns.empty()) {
    return false;
  }
  if (!episode_ext_returns.empty()) {
    update_ema(state.j_ext_ema, state.ext_initialized, state.ema_momentum,
               mean(episode_ext_returns));
  }
  if (!episode_int_returns.empty()) {
    update_ema(state.j_div_ema, state.div_initialized, state.ema_momentum,
               mean(episode_int_returns));
  }
  state.mask_d = apply_hysteresis(state.mask_d, state.j_div_ema, state.delta,
                                  state.hysteresis_d);
  state.mask_r = apply_hysteresis(state.mask_r, state.j_ext_ema,
                                  state.r_target, state.hysteresis_r);
  return true;
}

GateCoefficients gate_coefficients(bool mask_d, bool mask_r) {
  const double d = mask_d ? 1.0 : 0.0;
  const double r = mask_r ? 1.0 : 0.0;
  return {d, (1.0 - d) + r};
}

double compose_total_reward(double r_ext, double r_int, bool mask_d,
                            bool mask_r) {
  if (!std::isfinite(r_ext) || !std::isfinite(r_int)) {
    throw std::invalid_argument("compose_total_reward: non-finite reward");
  }
  const GateCoefficients c = gate_coefficients(mask_d, mask_r);
  return c.ext * r_ext + c.in * r_int;
}

void gated_value_targets(const std::vector<double>& returns_ext,
                         const std::vector<double>& returns_int, bool mask_d,
                         bool mask_r, std::vector<double>& target_ex,
                         std::vector<double>& target_in) {
  if (returns_ext.size() != returns_int.size()) {
    throw std::invalid_argument("gated_value_targets: length mismatch");
  }
  const GateCoefficients c = gate_coefficients(mask_d, mask_r);
  target_ex.resize(returns_ext.size());
  target_in.resize(returns_int.size());
  for (std::size_t i = 0; i < returns_ext.size(); ++i) {
    target_ex[i] = c.ext * returns_ext[i];
    target_in[i] = c.in * returns_int[i];
  }
}

}  // namespace dgpo
