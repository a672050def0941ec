// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "attndse/tensor.hpp"

namespace adse {

// Binary checkpoint, version 1. All integers little-endian.
//
//   magic     8 bytes   "ADSECKPT"
//   version   u32       1
//   meta_len  u64       length of the metadata JSON
//   meta      bytes     UTF-8 JSON object
//   count     u32       number of tensors
//   count times:
//     name_len u32, name bytes
//     rank u32, rank x u64 dims
//     prod(dims) x binary64 values
//
// Gradients are not stored.
struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<Parameter> tensors;

  const Parameter* find(const std::string& name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace adse
