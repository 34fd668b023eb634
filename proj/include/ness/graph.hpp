// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "ness/matrix.hpp"
#include "ness/sparse.hpp"

namespace ness {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  auto operator<=>(const Edge&) const = default;
};

/// List of undirected edges stored canonically (u < v), without duplicates or
/// self-loops. Order is preserved as given; canonical() additionally sorts.
class EdgeSet {
 public:
  EdgeSet() = default;
  /// Validates the invariants and keeps the given order.
  explicit EdgeSet(std::vector<Edge> edges);

  /// Swaps endpoints into u < v, drops self-loops and duplicates, sorts.
  static EdgeSet canonical(std::vector<Edge> edges);

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const Edge& operator[](std::size_t i) const { return edges_[i]; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool operator==(const EdgeSet&) const = default;

 private:
  std::vector<Edge> edges_;
};

/// Hash set over canonical edges for membership tests.
class EdgeLookup {
 public:
  EdgeLookup() = default;
  explicit EdgeLookup(const EdgeSet& edges) { insert(edges); }

  void insert(const EdgeSet& edges);
  void insert(Edge e) { keys_.insert(key(e)); }
  bool contains(NodeId a, NodeId b) const;
  bool contains(Edge e) const { return contains(e.u, e.v); }
  std::size_t size() const { return keys_.size(); }

 private:
  static std::uint64_t key(Edge e) {
    return (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint64_t>(e.v);
  }
  std::unordered_set<std::uint64_t> keys_;
};

/// Symmetric 0/1 adjacency with unit diagonal built from an edge set.
CsrMatrix adjacency_from_edges(std::size_t num_nodes, const EdgeSet& edges);

/// Node features, symmetric adjacency with self-loops, optional labels.
class Graph {
 public:
  std::size_t num_nodes() const { return features_.rows(); }
  std::size_t feature_dim() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  const CsrMatrix& adjacency() const { return adjacency_; }
  /// Canonical sorted undirected edges (no self-loops).
  const EdgeSet& edges() const { return edges_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  /// Row-normalized copy of the features (zero rows stay zero).
  Graph with_row_normalized_features() const;

 private:
  friend Graph build_graph(Matrix, std::span<const Edge>, std::optional<std::vector<int>>);
  Matrix features_;
  CsrMatrix adjacency_;
  EdgeSet edges_;
  std::optional<std::vector<int>> labels_;
};

/// Symmetrizes and deduplicates `edges`, forces the unit diagonal.
/// Throws DataError on out-of-range ids (naming the edge index), non-finite
/// features, or a label count different from the feature row count.
Graph build_graph(Matrix features, std::span<const Edge> edges,
                  std::optional<std::vector<int>> labels = std::nullopt);

/// D^{-1/2} A D^{-1/2} with degrees counted including the self-loop.
struct NormalizedAdjacency {
  CsrMatrix matrix;
};

NormalizedAdjacency normalize_adjacency(const CsrMatrix& adjacency);

/// Propagation step Â * dense.
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& dense);

/// Fraction of (non-self-loop) edges joining equally labelled nodes.
double edge_homophily(const Graph& graph);

}  // namespace ness
