// SPDX-License-Identifier: Apache-2.0
#include "ness/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ness {
namespace {

EdgeSet sorted(std::vector<Edge> edges) { return EdgeSet::canonical(std::move(edges)); }

std::vector<Edge> shuffled(const EdgeSet& edges, Rng& rng) {
  std::vector<Edge> v = edges.edges();
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

Partition deal(const std::vector<Edge>& permuted, std::size_t num_nodes, std::size_t k) {
  if (k == 0) throw std::invalid_argument("partition: K must be at least 1");
  if (k > permuted.size()) throw std::invalid_argument("partition: K exceeds the number of training edges");
  Partition p;
  const std::size_t base = permuted.size() / k;
  const std::size_t extra = permuted.size() % k;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    std::vector<Edge> block(permuted.begin() + static_cast<std::ptrdiff_t>(pos),
                            permuted.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    p.subgraphs.push_back(make_subgraph(b, num_nodes, sorted(std::move(block))));
  }
  return p;
}

std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace

Subgraph make_subgraph(std::size_t index, std::size_t num_nodes, EdgeSet edges) {
  Subgraph s;
  s.index = index;
  s.adjacency = adjacency_from_edges(num_nodes, edges);
  s.edges = std::move(edges);
  return s;
}

std::string partition_violation(const Partition& partition, const EdgeSet& train) {
  EdgeLookup seen;
  std::size_t total = 0;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& sg : partition.subgraphs) {
    for (const Edge& e : sg.edges) {
      if (seen.contains(e)) return "edge shared between subgraphs";
      seen.insert(e);
    }
    total += sg.edges.size();
    lo = std::min(lo, sg.edges.size());
    hi = std::max(hi, sg.edges.size());
  }
  if (total != train.size()) return "subgraphs do not cover the training set";
  for (const Edge& e : train)
    if (!seen.contains(e)) return "training edge missing from partition";
  if (!partition.subgraphs.empty() && hi - lo > 1) return "subgraph sizes differ by more than one";
  return {};
}

Split res_split(const Graph& graph, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("res_split: ratios must be non-negative and sum to 1");
  const std::size_t m = graph.edges().size();
  if (m < 10) throw std::invalid_argument("res_split: graph needs at least 10 edges");
  const auto n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(m) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(ratios.val * static_cast<double>(m) + 1e-9));
  if (n_test + n_val >= m) throw std::invalid_argument("res_split: no training edges left");

  Rng rng = make_stream(seed, "split");
  const auto perm = shuffled(graph.edges(), rng);
  Split s;
  s.seed = seed;
  s.test_pos = sorted({perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test)});
  s.val_pos = sorted({perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                      perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val)});
  s.train = sorted({perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), perm.end()});

  const std::size_t n = graph.num_nodes();
  if (n_test + n_val + m > pair_count(n))
    throw std::invalid_argument("res_split: graph too dense to sample evaluation negatives");
  EdgeLookup forbidden(graph.edges());
  s.test_neg = negative_sample(forbidden, m, n_test, n, rng);
  forbidden.insert(s.test_neg);
  s.val_neg = negative_sample(forbidden, m + n_test, n_val, n, rng);
  return s;
}

Partition partition_k(const EdgeSet& train, std::size_t num_nodes, std::size_t k, std::uint64_t seed) {
  Rng rng = make_stream(seed, "partition");
  return dynamic_res_partition(train, num_nodes, k, rng);
}

Partition dynamic_res_partition(const EdgeSet& train, std::size_t num_nodes, std::size_t k, Rng& rng) {
  if (k == 0 || k > train.size())
    throw std::invalid_argument("partition: K must be in [1, |train|]");
  return deal(shuffled(train, rng), num_nodes, k);
}

Subgraph dynamic_res_sample(const EdgeSet& train, std::size_t num_nodes, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("dynamic_res_sample: fraction must be in (0, 1]");
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(train.size()) - 1e-9));
  return sample_re(train, num_nodes, m, rng);
}

Subgraph drop_edges(const Subgraph& subgraph, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("drop_edges: p must be in [0, 1)");
  if (p == 0.0) return subgraph;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> kept;
  kept.reserve(subgraph.edges.size());
  for (const Edge& e : subgraph.edges)
    if (unit(rng) >= p) kept.push_back(e);
  return make_subgraph(subgraph.index, subgraph.num_nodes(), EdgeSet(std::move(kept)));
}

EdgeSet negative_sample(const EdgeLookup& forbidden, std::size_t forbidden_count, std::size_t count,
                        std::size_t num_nodes, Rng& rng) {
  const std::size_t total = pair_count(num_nodes);
  if (forbidden_count > total || count > total - forbidden_count)
    throw std::invalid_argument("negative_sample: not enough free node pairs");
  const std::size_t free_pairs = total - forbidden_count;
  std::vector<Edge> out;
  out.reserve(count);
  if (free_pairs < 2 * count) {
    std::vector<Edge> pool;
    pool.reserve(free_pairs);
    for (NodeId u = 0; u < num_nodes; ++u)
      for (NodeId v = u + 1; v < num_nodes; ++v)
        if (!forbidden.contains(u, v)) pool.push_back({u, v});
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
  } else {
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(num_nodes - 1));
    EdgeLookup chosen;
    while (out.size() < count) {
      NodeId u = node(rng), v = node(rng);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (forbidden.contains(u, v) || chosen.contains(u, v)) continue;
      chosen.insert(Edge{u, v});
      out.push_back({u, v});
    }
  }
  return sorted(std::move(out));
}

Subgraph sample_re(const EdgeSet& train, std::size_t num_nodes, std::size_t size, Rng& rng, std::size_t index) {
  if (size > train.size()) throw std::invalid_argument("sample_re: size exceeds the training set");
  std::vector<Edge> v = train.edges();
  for (std::size_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, v.size() - 1);
    std::swap(v[i], v[pick(rng)]);
  }
  v.resize(size);
  return make_subgraph(index, num_nodes, sorted(std::move(v)));
}

Subgraph sample_rwj(const EdgeSet& train, std::size_t num_nodes, std::size_t edge_budget, Rng& rng,
                    double jump_p, WalkTrace* trace, std::size_t index) {
  if (edge_budget > train.size()) throw std::invalid_argument("sample_rwj: budget exceeds the training set");
  if (num_nodes == 0) throw std::invalid_argument("sample_rwj: empty graph");
  std::vector<std::vector<NodeId>> nbrs(num_nodes);
  for (const Edge& e : train) {
    nbrs[e.u].push_back(e.v);
    nbrs[e.v].push_back(e.u);
  }
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(num_nodes - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WalkTrace local;
  WalkTrace& t = trace ? *trace : local;

  EdgeLookup collected;
  std::vector<Edge> edges;
  NodeId cur = node(rng);
  std::size_t stalled = 0;
  const std::size_t stall_limit = 64 * (num_nodes + train.size());
  while (edges.size() < edge_budget) {
    ++t.steps;
    if (stalled > stall_limit) {
      // Walk is trapped in an exhausted component (only possible for jump_p == 0).
      ++t.forced_jumps;
      stalled = 0;
      cur = node(rng);
      continue;
    }
    if (unit(rng) < jump_p) {
      ++t.jumps;
      cur = node(rng);
      continue;
    }
    if (nbrs[cur].empty()) {
      ++t.forced_jumps;
      cur = node(rng);
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, nbrs[cur].size() - 1);
    const NodeId next = nbrs[cur][pick(rng)];
    const Edge e{std::min(cur, next), std::max(cur, next)};
    if (!collected.contains(e)) {
      collected.insert(e);
      edges.push_back(e);
      stalled = 0;
    } else {
      ++stalled;
    }
    cur = next;
  }
  return make_subgraph(index, num_nodes, sorted(std::move(edges)));
}

Subgraph sample_rn(const EdgeSet& train, std::size_t num_nodes, std::size_t node_count, Rng& rng,
                   std::size_t index) {
  if (node_count > num_nodes) throw std::invalid_argument("sample_rn: node_count exceeds the node count");
  std::vector<NodeId> nodes(num_nodes);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  for (std::size_t i = 0; i < node_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, nodes.size() - 1);
    std::swap(nodes[i], nodes[pick(rng)]);
  }
  std::vector<bool> keep(num_nodes, false);
  for (std::size_t i = 0; i < node_count; ++i) keep[nodes[i]] = true;
  std::vector<Edge> edges;
  for (const Edge& e : train)
    if (keep[e.u] && keep[e.v]) edges.push_back(e);
  return make_subgraph(index, num_nodes, EdgeSet(std::move(edges)));
}

}  // namespace ness
