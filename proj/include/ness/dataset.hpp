// SPDX-License-Identifier: Apache-2.0
#pragma once

// Plain-text dataset files:
//   features: one node per line, whitespace-separated reals (line i = node i)
//   edges:    one undirected edge per line, two 0-based node ids
//   labels:   one integer class id per line

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ness/graph.hpp"

namespace ness {

struct DatasetBundle {
  Graph graph;
  std::string name;
  /// File paths or generator parameters the graph came from.
  std::string source;
};

struct DatasetPaths {
  std::filesystem::path features;
  std::filesystem::path edges;
  std::optional<std::filesystem::path> labels;
};

/// Throws DataError with file name and line number on malformed input.
DatasetBundle load_dataset(const DatasetPaths& paths, std::string name = {});

/// Writes the three files so that load_dataset reproduces `graph` exactly.
void export_dataset(const Graph& graph, const DatasetPaths& paths);

/// Standard file names inside a dataset directory.
DatasetPaths dataset_paths_in(const std::filesystem::path& dir, bool with_labels = true);

struct SbmParams {
  std::vector<std::size_t> block_sizes;
  double intra_p = 0.05;
  double inter_p = 0.002;
  std::size_t feature_dim = 16;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;
};

/// Stochastic block model: every pair (i, j) is linked independently with
/// intra_p inside a block and inter_p across blocks. Features are the one-hot
/// block id (in the first `blocks` columns) plus uniform noise in
/// [0, feature_noise] on every entry; labels are the block ids.
DatasetBundle generate_sbm(const SbmParams& params);

}  // namespace ness
