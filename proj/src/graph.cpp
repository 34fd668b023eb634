// SPDX-License-Identifier: Apache-2.0
#include "ness/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ness/error.hpp"
#include "ness/kernels.hpp"

namespace ness {

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  EdgeLookup seen;
  for (const Edge& e : edges_) {
    if (e.u >= e.v) throw std::invalid_argument("EdgeSet: edge not canonical (u < v required)");
    if (seen.contains(e)) throw std::invalid_argument("EdgeSet: duplicate edge");
    seen.insert(e);
  }
}

EdgeSet EdgeSet::canonical(std::vector<Edge> edges) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u == e.v) continue;
    if (e.u > e.v) std::swap(e.u, e.v);
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  EdgeSet s;
  s.edges_ = std::move(out);
  return s;
}

void EdgeLookup::insert(const EdgeSet& edges) {
  for (const Edge& e : edges) insert(e);
}

bool EdgeLookup::contains(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  return keys_.count(key({a, b})) != 0;
}

CsrMatrix adjacency_from_edges(std::size_t num_nodes, const EdgeSet& edges) {
  std::vector<std::vector<std::uint32_t>> nbrs(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) nbrs[i].push_back(static_cast<std::uint32_t>(i));
  for (const Edge& e : edges) {
    if (e.v >= num_nodes) throw std::invalid_argument("adjacency_from_edges: node id out of range");
    nbrs[e.u].push_back(e.v);
    nbrs[e.v].push_back(e.u);
  }
  CsrMatrix m;
  m.n = num_nodes;
  m.row_ptr.assign(1, 0);
  m.row_ptr.reserve(num_nodes + 1);
  m.col_idx.reserve(num_nodes + 2 * edges.size());
  for (auto& row : nbrs) {
    std::sort(row.begin(), row.end());
    m.col_idx.insert(m.col_idx.end(), row.begin(), row.end());
    m.row_ptr.push_back(m.col_idx.size());
  }
  m.values.assign(m.col_idx.size(), 1.0);
  return m;
}

Graph build_graph(Matrix features, std::span<const Edge> edges,
                  std::optional<std::vector<int>> labels) {
  const std::size_t n = features.rows();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].u >= n || edges[i].v >= n) {
      throw DataError("edge " + std::to_string(i) + " (" + std::to_string(edges[i].u) + ", " +
                      std::to_string(edges[i].v) + ") references a node >= " + std::to_string(n));
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (double x : features.row(r)) {
      if (!std::isfinite(x)) throw DataError("non-finite feature in row " + std::to_string(r));
    }
  }
  if (labels && labels->size() != n) {
    throw DataError("label count " + std::to_string(labels->size()) + " does not match " +
                    std::to_string(n) + " nodes");
  }
  Graph g;
  g.edges_ = EdgeSet::canonical({edges.begin(), edges.end()});
  g.adjacency_ = adjacency_from_edges(n, g.edges_);
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  return g;
}

Graph Graph::with_row_normalized_features() const {
  Graph g = *this;
  for (std::size_t r = 0; r < g.features_.rows(); ++r) {
    auto row = g.features_.row(r);
    double s = 0.0;
    for (double x : row) s += std::abs(x);
    if (s == 0.0) continue;
    for (double& x : row) x /= s;
  }
  return g;
}

NormalizedAdjacency normalize_adjacency(const CsrMatrix& a) {
  std::vector<double> degree(a.n, 0.0);
  for (std::size_t r = 0; r < a.n; ++r)
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) degree[r] += a.values[p];

  NormalizedAdjacency out{a};
  for (std::size_t r = 0; r < a.n; ++r) {
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const std::size_t c = a.col_idx[p];
      out.matrix.values[p] = a.values[p] / std::sqrt(degree[r] * degree[c]);
    }
  }
  return out;
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& dense) {
  return spmm(adj.matrix, dense);
}

double edge_homophily(const Graph& graph) {
  if (!graph.labels()) throw std::invalid_argument("edge_homophily: graph has no labels");
  const auto& labels = *graph.labels();
  if (graph.edges().empty()) throw std::invalid_argument("edge_homophily: graph has no edges");
  std::size_t same = 0;
  for (const Edge& e : graph.edges()) same += labels[e.u] == labels[e.v] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(graph.edges().size());
}

}  // namespace ness
