// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ness {

using Rng = std::mt19937_64;

/// Seed of the named substream of `master` (e.g. "split", "partition",
/// "dropedge", "negsample", "init", "sampler"). Computed as
/// splitmix64(master ^ fnv1a64(name)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view name);

inline Rng make_stream(std::uint64_t master, std::string_view name) {
  return Rng(derive_seed(master, name));
}

}  // namespace ness
