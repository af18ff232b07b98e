#include "dgpo/behavior.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "dgpo/four_goals.hpp"

namespace dgpo {

std::vector<double> behavior_embedding(const std::vector<Vec2>& trajectory,
                                       std::size_t horizon, double scale) {
  if (trajectory.empty()) {
    throw std::invalid_argument("behavior_embedding: empty trajectory");
  }
  if (trajectory.size() > horizon) {
    throw std::invalid_argument("behavior_embedding: trajectory longer than horizon");
  }
  std::vector<double> values;
  values.reserve(2 * horizon);
  for (const Vec2& p : trajectory) {
    values.push_back(p.x * scale);
    values.push_back(p.y * scale);
  }
  const Vec2 last = trajectory.back();
  for (std::size_t t = trajectory.size(); t < horizon; ++t) {
    values.push_back(last.x * scale);
    values.push_back(last.y * scale);
  }
  return values;
}

std::size_t solution_coverage(const std::vector<std::vector<double>>& embeddings,
                              EnvKind kind) {
  if (kind == EnvKind::kFourGoals) {
    std::set<std::size_t> goals;
    for (const auto& e : embeddings) {
      if (e.size() < 2) throw std::invalid_argument("solution_coverage: bad embedding");
      const Vec2 terminal{e[e.size() - 2], e[e.size() - 1]};
      goals.insert(FourGoalsEnv::nearest_goal_index(terminal));
    }
    return goals.size();
  }
  // TwoPaths: majority column sign relative to the walled center column,
  // on the [0, 1]-normalized embedding coordinates.
  std::set<int> sides;
  for (const auto& e : embeddings) {
    if (e.empty() || e.size() % 2 != 0) {
      throw std::invalid_argument("solution_coverage: bad embedding");
    }
    double vote = 0.0;
    for (std::size_t i = 0; i < e.size(); i += 2) {
      const double dx = e[i] - 0.5;
      if (dx > 1e-9) {
        vote += 1.0;
      } else if (dx < -1e-9) {
        vote -= 1.0;
      }
    }
    if (vote > 0) sides.insert(1);
    if (vote < 0) sides.insert(-1);
  }
  return sides.size();
}

}  // namespace dgpo
