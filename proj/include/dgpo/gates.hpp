#pragma once

#include <vector>

namespace dgpo {

// Running estimates of the discounted extrinsic return J and discounted
// intrinsic return J_Div, plus the two indicator masks that switch the
// training objective between the diversity-constrained and
// extrinsic-reward-constrained stages.
//
// mask_d = [J_Div >= delta], mask_r = [J >= R_target], with a hysteresis
// band: a mask turns on when its estimate reaches the threshold and turns
// off only once the estimate falls below threshold - hysteresis.
struct GateState {
  double j_ext_ema = 0.0;
  double j_div_ema = 0.0;
  double ema_momentum = 0.9;
  double delta = 0.0;
  double r_target = 0.0;
  double hysteresis_d = 0.0;  // band below delta
  double hysteresis_r = 0.0;  // band below r_target
  bool mask_d = false;
  bool mask_r = false;
  bool ext_initialized = false;
  bool div_initialized = false;
};

GateState make_gate_state(double delta, double r_target, double ema_momentum,
                          double hysteresis_d, double hysteresis_r);

// Folds a batch of completed-episode discounted returns into the EMAs and
// recomputes both masks. Returns false (state unchanged) when both lists are
// empty; callers flag that in their logs.
bool update_gates(GateState& state,
                  const std::vector<double>& episode_ext_returns,
                  const std::vector<double>& episode_int_returns);

// r_total = mask_d * r_ext + [(1 - mask_d) + mask_r] * r_int.
double compose_total_reward(double r_ext, double r_int, bool mask_d,
                            bool mask_r);

// Coefficients applied to the two reward streams for the current masks:
// {mask_d, (1 - mask_d) + mask_r}. Shared by reward composition and critic
// targets so the two paths cannot drift apart.
struct GateCoefficients {
  double ext = 0.0;
  double in = 0.0;
};
GateCoefficients gate_coefficients(bool mask_d, bool mask_r);

// target_ex = mask_d * returns_ext; target_in = [(1-mask_d)+mask_r] * returns_int.
void gated_value_targets(const std::vector<double>& returns_ext,
                         const std::vector<double>& returns_int, bool mask_d,
                         bool mask_r, std::vector<double>& target_ex,
                         std::vector<double>& target_in);

}  // namespace dgpo
