// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ness/graph.hpp"
#include "ness/matrix.hpp"

namespace ness {

double sigmoid(double x);
/// log(1 + e^x) without overflow.
double softplus(double x);

/// Inner-product decoder logits z_u . z_v for every edge.
std::vector<double> edge_logits(const Matrix& z, const EdgeSet& edges);
/// Decoder scores sigmoid(z_u . z_v).
std::vector<double> decode_edges(const Matrix& z, const EdgeSet& edges);

/// Decoder output for one subgraph: positives and an equal number of sampled
/// negatives. Logits are kept; scores are derived on demand.
struct EdgeScores {
  std::vector<double> pos_logits;
  std::vector<double> neg_logits;

  std::vector<double> pos_scores() const;
  std::vector<double> neg_scores() const;
};

EdgeScores score_edges(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg);

/// Balanced binary cross-entropy of one subgraph:
///   -(1 / 2n) * sum_i [log s(pos_i) + log(1 - s(neg_i))]
/// evaluated on logits via softplus. Requires n >= 1 and |neg| == |pos|.
double subgraph_recon_loss(const EdgeScores& scores);

struct ReconLoss {
  double mean = 0.0;
  std::vector<double> per_subgraph;
};

/// Mean of subgraph_recon_loss over the K subgraphs.
ReconLoss recon_loss(std::span<const EdgeScores> per_subgraph);

/// dz += scale * d subgraph_recon_loss / dz.
void accumulate_recon_grad(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg,
                           const EdgeScores& scores, double scale, Matrix& dz);

struct NtXentOptions {
  double tau = 0.5;
  /// Include the other nodes of the anchor's own view in the denominator
  /// (every vector of [h_a; h_b] except the anchor). When false only the
  /// other view's vectors are used.
  bool in_view_negatives = true;
};

struct NtXentResult {
  double value = 0.0;
  Matrix grad_a;
  Matrix grad_b;
  /// Rows whose norm was below 1e-12; their cosine similarities are 0.
  std::size_t zero_norm_rows = 0;
};

/// NT-Xent loss for one pair of projections, averaged over the 2N anchors.
double ntxent_pair(const Matrix& ha, const Matrix& hb, const NtXentOptions& opts = {});
NtXentResult ntxent_pair_with_grad(const Matrix& ha, const Matrix& hb, const NtXentOptions& opts = {});

struct ContrastiveResult {
  double value = 0.0;
  std::vector<Matrix> grads;
  std::size_t zero_norm_rows = 0;
};

/// Mean of ntxent_pair over all K(K-1)/2 unordered pairs. Requires K >= 2.
double contrastive_loss(std::span<const Matrix> projections, const NtXentOptions& opts = {});
ContrastiveResult contrastive_loss_with_grad(std::span<const Matrix> projections, const NtXentOptions& opts = {});

/// L_r + alpha * L_c for alpha in {0, 1}; L_c is not touched when alpha == 0.
double total_loss(double recon, double contrastive, int alpha);

struct LossBreakdown {
  double total = 0.0;
  double recon = 0.0;
  double contrastive = 0.0;
  std::vector<double> per_subgraph;
  int alpha = 0;
  double tau = 0.5;

  bool operator==(const LossBreakdown&) const = default;
};

}  // namespace ness
