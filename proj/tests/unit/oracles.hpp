// SPDX-License-Identifier: Apache-2.0
#pragma once

// Small helpers shared by the unit tests: random data and dense reference
// computations written without any of the library kernels.

#include <cmath>
#include <random>
#include <vector>

#include "ness/graph.hpp"
#include "ness/matrix.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline ness::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0,
                                  double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ness::Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline Dense dense(const ness::Matrix& m) {
  Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense c(a.size(), std::vector<double>(b.empty() ? 0 : b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t(a.empty() ? 0 : a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Dense relu(Dense a) {
  for (auto& row : a)
    for (double& x : row) x = x > 0 ? x : 0;
  return a;
}

/// D^-1/2 (A + I) D^-1/2 from an edge list.
inline Dense normalized_adjacency(std::size_t n, const std::vector<ness::Edge>& edges) {
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const auto& e : edges) a[e.u][e.v] = a[e.v][e.u] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i] * deg[j]);
  return a;
}

inline double max_diff(const ness::Matrix& m, const Dense& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - d[i][j]));
  return worst;
}

inline std::vector<ness::Edge> random_edges(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<ness::Edge> edges;
  for (ness::NodeId u = 0; u < n; ++u)
    for (ness::NodeId v = u + 1; v < n; ++v)
      if (keep(rng)) edges.push_back({u, v});
  return edges;
}

}  // namespace oracle
