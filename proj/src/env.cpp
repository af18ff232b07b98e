#include "dgpo/env.hpp"

#include <stdexcept>

#include "dgpo/four_goals.hpp"
#include "dgpo/two_paths.hpp"

namespace dgpo {

std::string env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kFourGoals:
      return "four_goals";
    case EnvKind::kTwoPaths:
      return "two_paths";
  }
  throw std::logic_error("env_kind_name: bad kind");
}

EnvKind env_kind_from_name(const std::string& name) {
  if (name == "four_goals") return EnvKind::kFourGoals;
  if (name == "two_paths") return EnvKind::kTwoPaths;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::unique_ptr<Env> make_env(EnvKind kind) {
  switch (kind) {
    case EnvKind::kFourGoals:
      return std::make_unique<FourGoalsEnv>();
    case EnvKind::kTwoPaths:
      return std::make_unique<TwoPathsEnv>();
  }
  throw std::logic_error("make_env: bad kind");
}

}  // namespace dgpo
