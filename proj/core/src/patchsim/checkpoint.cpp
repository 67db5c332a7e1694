#include "lart/patchsim/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lart/error.hpp"

namespace lart::patchsim {
namespace {

constexpr char kMagic[5] = {'L', 'A', 'R', 'T', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(std::string("checkpoint truncated reading ") + what);
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
}

}  // namespace

void save_checkpoint(std::ostream& out, const ParamSet<float>& params) {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(params.entries().size()));
  for (const auto& e : params.entries()) {
    put_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put_u32(out, static_cast<std::uint32_t>(e.tensor.rank()));
    for (std::size_t d : e.tensor.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : e.tensor.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw DataError("checkpoint write failed");
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet<float>& params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  save_checkpoint(out, params);
}

ParamSet<float> read_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint (bad magic)");
  }
  const std::uint32_t count = get_u32(in, "tensor count");
  ParamSet<float> params;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::uint32_t name_len = get_u32(in, "name length");
    if (name_len > 4096) throw DataError("checkpoint record has implausible name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw DataError("checkpoint truncated reading tensor name");
    const std::uint32_t rank = get_u32(in, "rank");
    if (rank > 8) throw DataError("checkpoint tensor '" + name + "' has implausible rank");
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (auto& d : shape) {
      d = get_u32(in, "dims");
      total *= d;
    }
    if (total > (std::size_t{1} << 28)) throw DataError("checkpoint tensor '" + name + "' is implausibly large");
    Tensor<float>& tensor = params.add(name, shape);
    for (float& v : tensor.values()) v = std::bit_cast<float>(get_u32(in, ("values of " + name).c_str()));
  }
  return params;
}

PatchSimModel<float> load_checkpoint(std::istream& in, const ModelConfig& cfg) {
  return PatchSimModel<float>(cfg, read_checkpoint(in));
}

PatchSimModel<float> load_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, cfg);
}

}  // namespace lart::patchsim
