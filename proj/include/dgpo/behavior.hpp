#pragma once

#include <vector>

#include "dgpo/env.hpp"

namespace dgpo {

// Fixed-length behavior descriptor: the (x, y) position after every step of
// an episode, concatenated. Episodes shorter than the horizon are padded by
// repeating the final position, so early termination does not fake
// diversity. Positions are multiplied by `scale` (1/6 normalizes gridworld
// coordinates to [0, 1]).
std::vector<double> behavior_embedding(const std::vector<Vec2>& trajectory,
                                       std::size_t horizon, double scale);

// Number of distinct solutions represented by one embedding per latent code.
// FourGoals: distinct nearest goals of the terminal positions. TwoPaths:
// distinct detour sides, where a latent's side is the majority sign of
// (column - center) over its episode.
std::size_t solution_coverage(const std::vector<std::vector<double>>& embeddings,
                              EnvKind kind);

}  // namespace dgpo
