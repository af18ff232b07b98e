#include "dgpo/two_paths.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace dgpo {

bool TwoPathsEnv::is_wall(int x, int y) {
  return x == 3 && y >= 1 && y <= 5;
}

std::size_t TwoPathsEnv::shortest_path_length() {
  // BFS over the open cells.
  std::vector<int> dist(kSize * kSize, -1);
  std::queue<std::pair<int, int>> q;
  dist[kStartY * kSize + kStartX] = 0;
  q.push({kStartX, kStartY});
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {1, -1, 0, 0};
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (x == kGoalX && y == kGoalY) {
      return static_cast<std::size_t>(dist[y * kSize + x]);
    }
    for (int a = 0; a < 4; ++a) {
      const int nx = x + dx[a];
      const int ny = y + dy[a];
      if (nx < 0 || nx >= kSize || ny < 0 || ny >= kSize) continue;
      if (is_wall(nx, ny)) continue;
      if (dist[ny * kSize + nx] >= 0) continue;
      dist[ny * kSize + nx] = dist[y * kSize + x] + 1;
      q.push({nx, ny});
    }
  }
  throw std::logic_error("TwoPathsEnv: goal unreachable");
}

EnvObs TwoPathsEnv::reset(std::uint64_t /*seed*/) {
  x_ = kStartX;
  y_ = kStartY;
  t_ = 0;
  done_ = false;
  return observe();
}

EnvObs TwoPathsEnv::observe() const {
  const double scale = 1.0 / (kSize - 1);
  EnvObs obs;
  obs.features = {x_ * scale, y_ * scale, (kGoalX - x_) * scale,
                  (kGoalY - y_) * scale, static_cast<double>(t_) / kHorizon};
  return obs;
}

StepResult TwoPathsEnv::step(std::size_t action) {
  if (action >= kActions) {
    throw std::invalid_argument("TwoPathsEnv: action out of range");
  }
  if (done_) {
    throw std::logic_error("TwoPathsEnv: step() called on finished episode");
  }
  const int dx[4] = {0, 0, -1, 1};
  const int dy[4] = {1, -1, 0, 0};
  const int nx = x_ + dx[action];
  const int ny = y_ + dy[action];
  // moves into walls or borders are no-ops
  if (nx >= 0 && nx < kSize && ny >= 0 && ny < kSize && !is_wall(nx, ny)) {
    x_ = nx;
    y_ = ny;
  }
  t_ += 1;

  StepResult res;
  res.reward = kStepPenalty;
  if (x_ == kGoalX && y_ == kGoalY) {
    res.reward += kGoalReward;
    done_ = true;
  }
  if (t_ >= kHorizon) done_ = true;
  res.done = done_;
  res.position = position();
  res.obs = observe();
  return res;
}

double TwoPathsEnv::optimal_discounted_return(double gamma) const {
  const std::size_t len = shortest_path_length();
  double ret = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < len; ++k) {
    double r = kStepPenalty;
    if (k + 1 == len) r += kGoalReward;
    ret += discount * r;
    discount *= gamma;
  }
  return ret;
}

double TwoPathsEnv::optimal_undiscounted_return() const {
  return kGoalReward + kStepPenalty * static_cast<double>(shortest_path_length());
}

}  // namespace dgpo
