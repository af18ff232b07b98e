#include "dgpo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dgpo {

namespace {

constexpr char kMagic[5] = {'D', 'G', 'P', 'O', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(os, bits);
}

void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

std::string get_str(std::istream& is) {
  const std::uint32_t len = get_u32(is);
  if (len > (1u << 20)) throw std::runtime_error("checkpoint: bad string");
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  put_u32(os, ckpt.n_z);
  put_u32(os, static_cast<std::uint32_t>(ckpt.sections.size()));
  for (const CheckpointSection& sec : ckpt.sections) {
    check_param_vector(sec.params);
    put_str(os, sec.name);
    put_u32(os, static_cast<std::uint32_t>(sec.spec.input_dim));
    put_u32(os, static_cast<std::uint32_t>(sec.spec.hidden.size()));
    for (std::size_t h : sec.spec.hidden)
      put_u32(os, static_cast<std::uint32_t>(h));
    put_u32(os, static_cast<std::uint32_t>(sec.spec.output_dim));
    put_u32(os, sec.spec.activation == Activation::kTanh ? 0u : 1u);
    put_u32(os, static_cast<std::uint32_t>(sec.params.layout.size()));
    for (const BlockShape& b : sec.params.layout) {
      put_str(os, b.name);
      put_u32(os, static_cast<std::uint32_t>(b.dims.size()));
      for (std::size_t d : b.dims) put_u64(os, d);
    }
    put_u64(os, sec.params.values.size());
    for (double v : sec.params.values) put_f64(os, v);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  Checkpoint ckpt;
  ckpt.n_z = get_u32(is);
  const std::uint32_t n_sections = get_u32(is);
  ckpt.sections.resize(n_sections);
  for (CheckpointSection& sec : ckpt.sections) {
    sec.name = get_str(is);
    sec.spec.input_dim = get_u32(is);
    const std::uint32_t n_hidden = get_u32(is);
    sec.spec.hidden.resize(n_hidden);
    for (std::uint32_t i = 0; i < n_hidden; ++i) sec.spec.hidden[i] = get_u32(is);
    sec.spec.output_dim = get_u32(is);
    sec.spec.activation =
        get_u32(is) == 0 ? Activation::kTanh : Activation::kRelu;
    const std::uint32_t n_blocks = get_u32(is);
    sec.params.layout.resize(n_blocks);
    for (BlockShape& b : sec.params.layout) {
      b.name = get_str(is);
      const std::uint32_t ndims = get_u32(is);
      b.dims.resize(ndims);
      for (std::uint32_t i = 0; i < ndims; ++i)
        b.dims[i] = static_cast<std::size_t>(get_u64(is));
    }
    const std::uint64_t n_values = get_u64(is);
    if (n_values != layout_size(sec.params.layout)) {
      throw std::runtime_error("checkpoint: layout/value count mismatch");
    }
    sec.params.values.resize(n_values);
    for (std::uint64_t i = 0; i < n_values; ++i)
      sec.params.values[i] = get_f64(is);
  }
  return ckpt;
}

}  // namespace dgpo
