// SPDX-License-Identifier: Apache-2.0
#pragma once

// Checkpoint file: one line of compact JSON, a newline, then every tensor of
// ModelParams in tensor_names() order as row-major little-endian float64.
//
//   {"format":"ness-checkpoint","version":1,"kind":"gnae","use_bias":false,
//    "seed":S,"epoch":E,"tensors":[{"name":..,"rows":..,"cols":..},...],
//    "meta":{...},"payload_sha256":"..","checksum":".."}
//
// `checksum` is the SHA-256 of the header serialized without that key,
// followed by the payload bytes.

#include <cstdint>
#include <filesystem>
#include <string>

#include "ness/config.hpp"
#include "ness/dataset.hpp"
#include "ness/encoders.hpp"

namespace ness {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  TrainConfig config;
  DatasetPaths dataset;
  std::string dataset_sha256;
  std::filesystem::path split_path;
};

struct Checkpoint {
  ModelParams params;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  CheckpointMeta meta;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
/// Throws DataError on a malformed header, a shape or size mismatch or a
/// hash mismatch.
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Hash over the dataset files in features, edges, labels order.
std::string dataset_sha256(const DatasetPaths& paths);

}  // namespace ness
