#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dgpo {

// One named parameter block (e.g. a layer's weight matrix) inside a
// flattened parameter vector.
struct BlockShape {
  std::string name;
  std::vector<std::size_t> dims;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
  }
};

// Flat array of 64-bit reals plus the layout describing how the array is
// carved into named blocks. The layout is stable across save/load.
struct ParamVector {
  std::vector<double> values;
  std::vector<BlockShape> layout;

  std::size_t size() const { return values.size(); }

  // Offset of a named block; throws if the name is unknown.
  std::size_t block_offset(const std::string& name) const;
  const BlockShape& block(const std::string& name) const;

  double* block_data(const std::string& name) {
    return values.data() + block_offset(name);
  }
  const double* block_data(const std::string& name) const {
    return values.data() + block_offset(name);
  }
};

// Builds a zeroed ParamVector for the given layout.
ParamVector make_param_vector(std::vector<BlockShape> layout);

// Total element count implied by a layout.
std::size_t layout_size(const std::vector<BlockShape>& layout);

// Checks that values.size() matches the layout; throws otherwise.
void check_param_vector(const ParamVector& params);

}  // namespace dgpo
