#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgpo/mlp.hpp"
#include "dgpo/param_vector.hpp"

namespace dgpo {

// One named network inside a checkpoint.
struct CheckpointSection {
  std::string name;
  MlpSpec spec;
  ParamVector params;
};

struct Checkpoint {
  std::uint32_t n_z = 1;
  std::vector<CheckpointSection> sections;
};

// Binary format: magic "DGPO1", n_z, then per section its name, MlpSpec,
// block layout table and the raw values as little-endian 64-bit reals in
// layout order. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dgpo
