#include "dgpo/four_goals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgpo {

namespace {

// 8 compass directions, unit length, counterclockwise from east.
const std::array<Vec2, FourGoalsEnv::kActions>& directions() {
  static const std::array<Vec2, FourGoalsEnv::kActions> dirs = [] {
    std::array<Vec2, FourGoalsEnv::kActions> d;
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k < FourGoalsEnv::kActions; ++k) {
      d[k] = {std::cos(k * pi / 4.0), std::sin(k * pi / 4.0)};
    }
    return d;
  }();
  return dirs;
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

const std::array<Vec2, 4>& FourGoalsEnv::goals() {
  static const std::array<Vec2, 4> g = {
      Vec2{1.0, 0.0}, Vec2{-1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{0.0, -1.0}};
  return g;
}

double FourGoalsEnv::nearest_goal_distance(Vec2 pos) {
  double best = dist(pos, goals()[0]);
  for (std::size_t i = 1; i < goals().size(); ++i) {
    best = std::min(best, dist(pos, goals()[i]));
  }
  return best;
}

std::size_t FourGoalsEnv::nearest_goal_index(Vec2 pos) {
  std::size_t best = 0;
  double best_d = dist(pos, goals()[0]);
  for (std::size_t i = 1; i < goals().size(); ++i) {
    const double d = dist(pos, goals()[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

EnvObs FourGoalsEnv::reset(std::uint64_t /*seed*/) {
  pos_ = {0.0, 0.0};
  t_ = 0;
  done_ = false;
  return observe();
}

EnvObs FourGoalsEnv::observe() const {
  EnvObs obs;
  obs.features.reserve(obs_dim());
  obs.features.push_back(pos_.x);
  obs.features.push_back(pos_.y);
  for (const Vec2& g : goals()) {
    obs.features.push_back((g.x - pos_.x) / 2.0);
    obs.features.push_back((g.y - pos_.y) / 2.0);
  }
  obs.features.push_back(static_cast<double>(t_) / kHorizon);
  return obs;
}

StepResult FourGoalsEnv::step(std::size_t action) {
  if (action >= kActions) {
    throw std::invalid_argument("FourGoalsEnv: action out of range");
  }
  if (done_) {
    throw std::logic_error("FourGoalsEnv: step() called on finished episode");
  }
  const Vec2 dir = directions()[action];
  pos_.x = std::clamp(pos_.x + kStepLength * dir.x, -kBound, kBound);
  pos_.y = std::clamp(pos_.y + kStepLength * dir.y, -kBound, kBound);
  t_ += 1;

  StepResult res;
  const double d = nearest_goal_distance(pos_);
  res.reward = -d;
  if (d <= kGoalRadius) {
    res.reward += kGoalBonus;
    done_ = true;
  }
  if (t_ >= kHorizon) done_ = true;
  res.done = done_;
  res.position = pos_;
  res.obs = observe();
  return res;
}

double FourGoalsEnv::optimal_discounted_return(double gamma) const {
  // Straight-line rollout toward goal (1, 0).
  FourGoalsEnv env;
  env.reset(0);
  double ret = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < kHorizon; ++t) {
    const StepResult r = env.step(0);
    ret += discount * r.reward;
    discount *= gamma;
    if (r.done) break;
  }
  return ret;
}

double FourGoalsEnv::optimal_undiscounted_return() const {
  return optimal_discounted_return(1.0);
}

}  // namespace dgpo
