// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ness/graph.hpp"
#include "ness/rng.hpp"

namespace ness {

/// Train/validation/test edge split with fixed evaluation negatives.
struct Split {
  EdgeSet train;
  EdgeSet val_pos;
  EdgeSet val_neg;
  EdgeSet test_pos;
  EdgeSet test_neg;
  std::uint64_t seed = 0;

  bool operator==(const Split&) const = default;
};

struct SplitRatios {
  double train = 0.85;
  double val = 0.05;
  double test = 0.10;
};

/// One masked view of the training graph: its own edges plus all N self-loops.
struct Subgraph {
  std::size_t index = 0;
  EdgeSet edges;
  CsrMatrix adjacency;

  std::size_t num_nodes() const { return adjacency.n; }
  bool operator==(const Subgraph&) const = default;
};

Subgraph make_subgraph(std::size_t index, std::size_t num_nodes, EdgeSet edges);

/// K subgraphs. Produced by partition_k they are edge-disjoint and cover the
/// training set; the RE/RWJ/RN samplers produce possibly overlapping sets.
struct Partition {
  std::vector<Subgraph> subgraphs;

  std::size_t k() const { return subgraphs.size(); }
  bool operator==(const Partition&) const = default;
};

/// Checks disjointness, exact coverage of `train` and size balance (<= 1).
/// Returns an empty string when every invariant holds.
std::string partition_violation(const Partition& partition, const EdgeSet& train);

/// Random edge split. test and val counts are floor(ratio * |E|), train takes
/// the remainder. Negatives for val/test avoid every known edge and each other.
Split res_split(const Graph& graph, SplitRatios ratios, std::uint64_t seed);

/// Static K-way random edge partition of the training edges; block sizes
/// differ by at most one, earlier blocks take the remainder.
Partition partition_k(const EdgeSet& train, std::size_t num_nodes, std::size_t k, std::uint64_t seed);

/// ceil(fraction * |train|) uniformly chosen training edges.
Subgraph dynamic_res_sample(const EdgeSet& train, std::size_t num_nodes, double fraction, Rng& rng);

/// partition_k drawing from `rng` instead of a fixed seed.
Partition dynamic_res_partition(const EdgeSet& train, std::size_t num_nodes, std::size_t k, Rng& rng);

/// Keeps each edge independently with probability 1 - p; self-loops stay.
Subgraph drop_edges(const Subgraph& subgraph, double p, Rng& rng);

/// `count` distinct uniform non-self-loop pairs outside `forbidden`.
/// Rejection sampling; falls back to enumerating the free pairs when they are
/// fewer than twice the requested count.
EdgeSet negative_sample(const EdgeLookup& forbidden, std::size_t forbidden_count, std::size_t count,
                        std::size_t num_nodes, Rng& rng);

/// Random-edge sampler: `size` uniform edges of `train`.
Subgraph sample_re(const EdgeSet& train, std::size_t num_nodes, std::size_t size, Rng& rng,
                   std::size_t index = 0);

struct WalkTrace {
  std::size_t steps = 0;
  std::size_t jumps = 0;         ///< voluntary jumps with probability jump_p
  std::size_t forced_jumps = 0;  ///< jumps from nodes without neighbors
};

/// Random walk with jumps: from a uniform start node, at every step jump to a
/// uniform node with probability `jump_p`, otherwise move to a uniform
/// neighbor and collect the traversed edge, until `edge_budget` distinct
/// edges have been collected.
Subgraph sample_rwj(const EdgeSet& train, std::size_t num_nodes, std::size_t edge_budget, Rng& rng,
                    double jump_p = 0.1, WalkTrace* trace = nullptr, std::size_t index = 0);

/// Random-node sampler: subgraph induced by `node_count` uniform nodes.
Subgraph sample_rn(const EdgeSet& train, std::size_t num_nodes, std::size_t node_count, Rng& rng,
                   std::size_t index = 0);

}  // namespace ness
