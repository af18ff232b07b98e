#include "dgpo/param_vector.hpp"

#include <stdexcept>

namespace dgpo {

std::size_t ParamVector::block_offset(const std::string& name) const {
  std::size_t offset = 0;
  for (const BlockShape& b : layout) {
    if (b.name == name) return offset;
    offset += b.size();
  }
  throw std::invalid_argument("ParamVector: unknown block '" + name + "'");
}

const BlockShape& ParamVector::block(const std::string& name) const {
  for (const BlockShape& b : layout) {
    if (b.name == name) return b;
  }
  throw std::invalid_argument("ParamVector: unknown block '" + name + "'");
}

std::size_t layout_size(const std::vector<BlockShape>& layout) {
  std::size_t n = 0;
  for (const BlockShape& b : layout) n += b.size();
  return n;
}

ParamVector make_param_vector(std::vector<BlockShape> layout) {
  ParamVector p;
  p.values.assign(layout_size(layout), 0.0);
  p.layout = std::move(layout);
  return p;
}

void check_param_vector(const ParamVector& params) {
  if (params.values.size() != layout_size(params.layout)) {
    throw std::invalid_argument(
        "ParamVector: values length " + std::to_string(params.values.size()) +
        " does not match layout size " +
        std::to_string(layout_size(params.layout)));
  }
}

}  // namespace dgpo
