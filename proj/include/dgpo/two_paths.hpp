#pragma once

#include "dgpo/env.hpp"

namespace dgpo {

// 7x7 gridworld whose center column is walled off between start and goal, so
// every shortest path detours either left or right. Both detours have equal
// length, giving exactly two optimal strategies.
class TwoPathsEnv final : public Env {
 public:
  static constexpr int kSize = 7;
  static constexpr std::size_t kActions = 4;  // up, down, left, right
  static constexpr std::size_t kHorizon = 40;
  static constexpr double kStepPenalty = -0.02;
  static constexpr double kGoalReward = 1.0;

  static constexpr int kStartX = 3, kStartY = 0;
  static constexpr int kGoalX = 3, kGoalY = 6;

  static bool is_wall(int x, int y);

  // Shortest start-to-goal path length by breadth-first search.
  static std::size_t shortest_path_length();

  EnvKind kind() const override { return EnvKind::kTwoPaths; }
  std::size_t obs_dim() const override { return 5; }
  std::size_t n_actions() const override { return kActions; }
  std::size_t horizon() const override { return kHorizon; }
  double embedding_scale() const override { return 1.0 / (kSize - 1); }
  // every strategy ends at the single goal cell
  double terminal_intrinsic_baseline() const override { return kSharedGoalLogOdds; }
  static constexpr double kSharedGoalLogOdds = -0.6931471805599453;  // ln(1/2)

  EnvObs reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  Vec2 position() const override {
    return {static_cast<double>(x_), static_cast<double>(y_)};
  }

  double optimal_discounted_return(double gamma) const override;
  double optimal_undiscounted_return() const override;

  // Flat state index for occupancy measurements.
  std::size_t state_index() const {
    return static_cast<std::size_t>(y_) * kSize + static_cast<std::size_t>(x_);
  }
  static std::size_t n_states() { return kSize * kSize; }

 private:
  EnvObs observe() const;

  int x_ = kStartX;
  int y_ = kStartY;
  std::size_t t_ = 0;
  bool done_ = true;
};

}  // namespace dgpo
