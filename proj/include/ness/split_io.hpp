// SPDX-License-Identifier: Apache-2.0
#pragma once

// Split/partition file: a single compact JSON object
//   {"version":1,"num_nodes":N,"seed":S,
//    "train":[[u,v],...],"val_pos":[...],"val_neg":[...],
//    "test_pos":[...],"test_neg":[...],
//    "partition":[[[u,v],...], ...K lists],
//    "checksum":"<sha256 of the object serialized without this key>"}
// Keys appear in exactly this order; the file ends with a newline.

#include <filesystem>
#include <string>
#include <utility>

#include "ness/splitter.hpp"

namespace ness {

inline constexpr int kSplitFormatVersion = 1;

std::string serialize_split(const Split& split, const Partition& partition, std::size_t num_nodes);
std::pair<Split, Partition> parse_split(const std::string& text);

void save_split(const Split& split, const Partition& partition, std::size_t num_nodes,
                const std::filesystem::path& path);
/// Throws DataError on version mismatch, checksum failure or malformed content.
std::pair<Split, Partition> load_split(const std::filesystem::path& path);

}  // namespace ness
