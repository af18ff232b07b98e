#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dgpo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct EnvObs {
  std::vector<double> features;
};

struct StepResult {
  EnvObs obs;
  double reward = 0.0;
  bool done = false;
  Vec2 position;  // true agent position, for behavior embeddings
};

enum class EnvKind { kFourGoals, kTwoPaths };

std::string env_kind_name(EnvKind kind);
EnvKind env_kind_from_name(const std::string& name);

class Env {
 public:
  virtual ~Env() = default;

  virtual EnvKind kind() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t n_actions() const = 0;
  virtual std::size_t horizon() const = 0;

  virtual EnvObs reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::size_t action) = 0;

  virtual Vec2 position() const = 0;

  // Scale applied to positions when building behavior embeddings
  // (gridworld coordinates are normalized to [0, 1]).
  virtual double embedding_scale() const = 0;

  // Unavoidable per-step diversity reward at a goal state every strategy
  // must share. Episodes that end early are treated as absorbing into their
  // terminal state for the rest of the horizon; this baseline removes the
  // constant part of that tail. Zero when strategies can terminate at
  // distinct states (FourGoals); ln(1/2) when all strategies end at one
  // common goal (TwoPaths).
  virtual double terminal_intrinsic_baseline() const = 0;

  // Return of the best strategy, from the environment's oracle
  // (straight-line rollout or shortest-path search).
  virtual double optimal_discounted_return(double gamma) const = 0;
  virtual double optimal_undiscounted_return() const = 0;
};

std::unique_ptr<Env> make_env(EnvKind kind);

}  // namespace dgpo
