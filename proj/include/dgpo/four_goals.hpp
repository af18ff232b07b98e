#pragma once

#include <array>

#include "dgpo/env.hpp"

namespace dgpo {

// Continuous 2-D field with four equally distant goals. The agent starts at
// the origin and moves by fixed-length steps along one of 8 compass
// directions. Per-step reward is minus the distance to the nearest goal; a
// +5 bonus ends the episode once the agent is within the goal radius.
class FourGoalsEnv final : public Env {
 public:
  static constexpr std::size_t kActions = 8;
  static constexpr std::size_t kHorizon = 32;
  static constexpr double kStepLength = 0.1;
  static constexpr double kGoalRadius = 0.1;
  static constexpr double kBound = 1.5;
  static constexpr double kGoalBonus = 5.0;

  static const std::array<Vec2, 4>& goals();

  static double nearest_goal_distance(Vec2 pos);
  static std::size_t nearest_goal_index(Vec2 pos);  // ties: lowest index

  EnvKind kind() const override { return EnvKind::kFourGoals; }
  std::size_t obs_dim() const override { return 11; }
  std::size_t n_actions() const override { return kActions; }
  std::size_t horizon() const override { return kHorizon; }
  double embedding_scale() const override { return 1.0; }
  double terminal_intrinsic_baseline() const override { return 0.0; }

  EnvObs reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  Vec2 position() const override { return pos_; }

  double optimal_discounted_return(double gamma) const override;
  double optimal_undiscounted_return() const override;

 private:
  EnvObs observe() const;

  Vec2 pos_;
  std::size_t t_ = 0;
  bool done_ = true;
};

}  // namespace dgpo
