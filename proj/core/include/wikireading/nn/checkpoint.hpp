#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wikireading/nn/tensor.hpp"

namespace wikireading::nn {

// Archive layout (all integers little-endian):
//   "WRCKPT01"
//   u64 manifest byte length, manifest bytes (UTF-8 JSON text)
//   u32 parameter count
//   per parameter:
//     u32 name length, name bytes, u8 trainable,
//     u32 rank, u32 dims[rank], f32 values[product(dims)]

struct StoredParameter {
  std::string name;
  Tensor value;
  bool trainable = true;
};

struct Checkpoint {
  std::string manifest;
  std::vector<StoredParameter> parameters;
};

void write_checkpoint(const std::filesystem::path& path, const ParameterSet& params, const std::string& manifest);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies stored values into same-named parameters. Every parameter in
/// `params` must be present with a matching shape.
void load_parameters(ParameterSet& params, const Checkpoint& checkpoint);

}  // namespace wikireading::nn
