#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xlt/model/model.hpp"

namespace xlt::model {

// Binary checkpoint layout (all integers little-endian):
//   magic "XLTMODEL", u32 version
//   u32 d, h, d^T, S, W, K; f32 dropout
//   u32 language count; per language: tag, token count, tokens (id order,
//     PAD/UNK implicit) -- strings are u32 length + UTF-8 bytes
//   u32 tensor count; per tensor: name, u32 ndim, u32 dims..., u64 offset
//   u64 payload byte count; payload of f32 values, row-major, in slot order
//
// Slot order in the file equals ParamStore insertion order, which makes
// save(load(file)) reproduce the file byte for byte.
inline constexpr char kCheckpointMagic[8] = {'X', 'L', 'T', 'M', 'O', 'D', 'E', 'L'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const TransferModel& model, const std::filesystem::path& file);
TransferModel load_checkpoint(const std::filesystem::path& file);

// Header-level reader used by tests and tooling to compare serialized
// tensors without deserializing a full model.
struct RawTensorEntry {
  std::string name;
  std::vector<int> shape;
  std::uint64_t offset = 0;
  std::uint64_t byte_size = 0;
};

struct RawCheckpoint {
  std::uint32_t version = 0;
  ModelConfig cfg;
  std::vector<std::string> lang_tags;
  std::vector<RawTensorEntry> tensors;
  std::vector<char> payload;

  // Raw little-endian f32 bytes of one tensor.
  std::vector<char> tensor_bytes(const std::string& name) const;
};

RawCheckpoint read_checkpoint_raw(const std::filesystem::path& file);

}  // namespace xlt::model
