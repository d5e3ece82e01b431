#include "wikireading/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace wikireading::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'W', 'R', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw std::runtime_error("checkpoint truncated");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

std::string get_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw std::runtime_error("checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const ParameterSet& params, const std::string& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint64_t>(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_le<std::uint8_t>(out, p->trainable ? 1 : 0);
    const Shape& shape = p->value.shape();
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (Scalar v : p->value.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error(path.string() + " is not a checkpoint archive");
  }
  Checkpoint ckpt;
  ckpt.manifest = get_bytes(in, get_le<std::uint64_t>(in));
  const auto count = get_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredParameter p;
    p.name = get_bytes(in, get_le<std::uint32_t>(in));
    p.trainable = get_le<std::uint8_t>(in) != 0;
    const auto rank = get_le<std::uint32_t>(in);
    Shape shape(rank);
    for (auto& d : shape) d = get_le<std::uint32_t>(in);
    Tensor t(shape);
    for (auto& v : t.values()) v = std::bit_cast<float>(get_le<std::uint32_t>(in));
    p.value = std::move(t);
    ckpt.parameters.push_back(std::move(p));
  }
  return ckpt;
}

void load_parameters(ParameterSet& params, const Checkpoint& checkpoint) {
  std::map<std::string_view, const StoredParameter*> stored;
  for (const auto& p : checkpoint.parameters) stored.emplace(p.name, &p);
  for (auto& p : params) {
    auto it = stored.find(p->name);
    if (it == stored.end()) throw std::runtime_error("checkpoint lacks parameter " + p->name);
    if (it->second->value.shape() != p->value.shape()) {
      throw ShapeError("checkpoint parameter " + p->name + " has shape " + to_string(it->second->value.shape()) +
                       ", model expects " + to_string(p->value.shape()));
    }
    p->value = it->second->value;
  }
}

}  // namespace wikireading::nn
