// SPDX-License-Identifier: Apache-2.0
#include "ness/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ness {
namespace {

constexpr double kZeroNorm = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Row-normalized stack [a; b]. Zero rows stay zero.
struct UnitRows {
  Matrix u;
  std::vector<double> norm;
  std::size_t zero_rows = 0;
};

UnitRows unit_rows(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows(), d = a.cols();
  UnitRows out{Matrix(2 * n, d), std::vector<double>(2 * n, 0.0), 0};
  for (std::size_t r = 0; r < 2 * n; ++r) {
    const auto src = r < n ? a.row(r) : b.row(r - n);
    const double nrm = std::sqrt(dot(src, src));
    out.norm[r] = nrm;
    if (nrm < kZeroNorm) {
      ++out.zero_rows;
      continue;
    }
    auto dst = out.u.row(r);
    for (std::size_t c = 0; c < d; ++c) dst[c] = src[c] / nrm;
  }
  return out;
}

void check_pair(const Matrix& a, const Matrix& b, const NtXentOptions& opts) {
  if (!same_shape(a, b)) throw std::invalid_argument("ntxent_pair: projection shapes differ");
  if (a.rows() == 0) throw std::invalid_argument("ntxent_pair: empty projection");
  if (!(opts.tau > 0.0)) throw std::invalid_argument("ntxent_pair: tau must be positive");
}

bool candidate(std::size_t r, std::size_t c, std::size_t n, bool in_view) {
  if (r == c) return false;
  return in_view || ((r < n) != (c < n));
}

// Per-row log-sum-exp over the candidate set and the positive logit.
struct RowStats {
  std::vector<double> lse;
  std::vector<double> pos;
};

RowStats row_stats(const Matrix& u, std::size_t n, const NtXentOptions& opts) {
  const std::size_t m = 2 * n;
  RowStats st{std::vector<double>(m), std::vector<double>(m)};
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < rows; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const auto ur = u.row(r);
    double mx = -INFINITY;
    std::vector<double> s(m);
    for (std::size_t c = 0; c < m; ++c) {
      if (!candidate(r, c, n, opts.in_view_negatives)) continue;
      s[c] = dot(ur, u.row(c)) / opts.tau;
      mx = std::max(mx, s[c]);
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c)
      if (candidate(r, c, n, opts.in_view_negatives)) acc += std::exp(s[c] - mx);
    st.lse[r] = mx + std::log(acc);
    st.pos[r] = s[r < n ? r + n : r - n];
  }
  return st;
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

std::vector<double> edge_logits(const Matrix& z, const EdgeSet& edges) {
  std::vector<double> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.v >= z.rows()) throw std::invalid_argument("edge_logits: node id out of range");
    out.push_back(dot(z.row(e.u), z.row(e.v)));
  }
  return out;
}

std::vector<double> decode_edges(const Matrix& z, const EdgeSet& edges) {
  auto out = edge_logits(z, edges);
  for (double& x : out) x = sigmoid(x);
  return out;
}

std::vector<double> EdgeScores::pos_scores() const {
  std::vector<double> s(pos_logits);
  for (double& x : s) x = sigmoid(x);
  return s;
}

std::vector<double> EdgeScores::neg_scores() const {
  std::vector<double> s(neg_logits);
  for (double& x : s) x = sigmoid(x);
  return s;
}

EdgeScores score_edges(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg) {
  return {edge_logits(z, pos), edge_logits(z, neg)};
}

double subgraph_recon_loss(const EdgeScores& scores) {
  const std::size_t n = scores.pos_logits.size();
  if (n == 0) throw std::invalid_argument("recon_loss: subgraph has no positive edges");
  if (scores.neg_logits.size() != n) throw std::invalid_argument("recon_loss: negative count must equal positive count");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += softplus(-scores.pos_logits[i]) + softplus(scores.neg_logits[i]);
  return acc / (2.0 * static_cast<double>(n));
}

ReconLoss recon_loss(std::span<const EdgeScores> per_subgraph) {
  if (per_subgraph.empty()) throw std::invalid_argument("recon_loss: no subgraphs");
  ReconLoss out;
  double acc = 0.0;
  for (const auto& s : per_subgraph) {
    out.per_subgraph.push_back(subgraph_recon_loss(s));
    acc += out.per_subgraph.back();
  }
  out.mean = acc / static_cast<double>(per_subgraph.size());
  return out;
}

void accumulate_recon_grad(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg,
                           const EdgeScores& scores, double scale, Matrix& dz) {
  const double w = scale / (2.0 * static_cast<double>(pos.size()));
  const std::size_t d = z.cols();
  auto push = [&](const Edge& e, double g) {
    auto zu = z.row(e.u), zv = z.row(e.v);
    auto du = dz.row(e.u), dv = dz.row(e.v);
    for (std::size_t c = 0; c < d; ++c) {
      du[c] += g * zv[c];
      dv[c] += g * zu[c];
    }
  };
  // d softplus(-x)/dx = -sigmoid(-x); d softplus(x)/dx = sigmoid(x)
  for (std::size_t i = 0; i < pos.size(); ++i) push(pos[i], -w * sigmoid(-scores.pos_logits[i]));
  for (std::size_t i = 0; i < neg.size(); ++i) push(neg[i], w * sigmoid(scores.neg_logits[i]));
}

double ntxent_pair(const Matrix& ha, const Matrix& hb, const NtXentOptions& opts) {
  check_pair(ha, hb, opts);
  const std::size_t n = ha.rows();
  const UnitRows ur = unit_rows(ha, hb);
  const RowStats st = row_stats(ur.u, n, opts);
  double acc = 0.0;
  for (std::size_t r = 0; r < 2 * n; ++r) acc += st.lse[r] - st.pos[r];
  return acc / (2.0 * static_cast<double>(n));
}

NtXentResult ntxent_pair_with_grad(const Matrix& ha, const Matrix& hb, const NtXentOptions& opts) {
  check_pair(ha, hb, opts);
  const std::size_t n = ha.rows(), d = ha.cols(), m = 2 * n;
  const UnitRows ur = unit_rows(ha, hb);
  const Matrix& u = ur.u;
  const RowStats st = row_stats(u, n, opts);

  NtXentResult out;
  out.zero_norm_rows = ur.zero_rows;
  for (std::size_t r = 0; r < m; ++r) out.value += st.lse[r] - st.pos[r];
  const double inv = 1.0 / static_cast<double>(m);
  out.value *= inv;

  // With S = U U^T / tau and G[r][c] = inv * (softmax_r(c) - [c == pos(r)]),
  // dU_r = sum_c (G[r][c] + G[c][r]) U_c / tau. S is symmetric, so G[c][r]
  // is recomputed from S[r][c] and the row statistics of c.
  Matrix du(m, d);
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < rows; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    const std::size_t pr = r < n ? r + n : r - n;
    const auto urow = u.row(r);
    auto out_row = du.row(r);
    for (std::size_t c = 0; c < m; ++c) {
      if (!candidate(r, c, n, opts.in_view_negatives)) continue;
      const double s = dot(urow, u.row(c)) / opts.tau;
      double g = std::exp(s - st.lse[r]) + std::exp(s - st.lse[c]);
      if (c == pr) g -= 2.0;
      g *= inv / opts.tau;
      const auto uc = u.row(c);
      for (std::size_t k = 0; k < d; ++k) out_row[k] += g * uc[k];
    }
  }

  out.grad_a = Matrix(n, d);
  out.grad_b = Matrix(n, d);
  for (std::size_t r = 0; r < m; ++r) {
    if (ur.norm[r] < kZeroNorm) continue;
    const auto urow = u.row(r);
    const auto drow = du.row(r);
    const double proj = dot(urow, drow);
    auto dst = r < n ? out.grad_a.row(r) : out.grad_b.row(r - n);
    for (std::size_t k = 0; k < d; ++k) dst[k] = (drow[k] - urow[k] * proj) / ur.norm[r];
  }
  return out;
}

double contrastive_loss(std::span<const Matrix> projections, const NtXentOptions& opts) {
  const std::size_t k = projections.size();
  if (k < 2) throw std::invalid_argument("contrastive_loss: needs at least two views");
  double acc = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) acc += ntxent_pair(projections[a], projections[b], opts);
  return acc / static_cast<double>(k * (k - 1) / 2);
}

ContrastiveResult contrastive_loss_with_grad(std::span<const Matrix> projections, const NtXentOptions& opts) {
  const std::size_t k = projections.size();
  if (k < 2) throw std::invalid_argument("contrastive_loss: needs at least two views");
  const double inv_pairs = 1.0 / static_cast<double>(k * (k - 1) / 2);
  ContrastiveResult out;
  for (const auto& h : projections) out.grads.emplace_back(h.rows(), h.cols());
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      auto pair = ntxent_pair_with_grad(projections[a], projections[b], opts);
      out.value += pair.value;
      out.zero_norm_rows += pair.zero_norm_rows;
      axpy_inplace(out.grads[a], inv_pairs, pair.grad_a);
      axpy_inplace(out.grads[b], inv_pairs, pair.grad_b);
    }
  }
  out.value *= inv_pairs;
  return out;
}

double total_loss(double recon, double contrastive, int alpha) {
  if (alpha != 0 && alpha != 1) throw std::invalid_argument("total_loss: alpha must be 0 or 1");
  if (alpha == 0) return recon;
  return recon + contrastive;
}

}  // namespace ness
