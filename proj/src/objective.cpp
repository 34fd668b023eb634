// SPDX-License-Identifier: Apache-2.0
#include "ness/objective.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ness/error.hpp"

namespace ness {
namespace {

struct Forward {
  Matrix transformed;
  std::vector<EncoderTape> tapes;
  std::vector<EdgeScores> scores;
  std::vector<ProjectionTape> projections;
  LossBreakdown loss;
};

Forward run_forward(const ModelParams& params, const Matrix& x, std::span<const ReconView> views,
                    const ObjectiveOptions& opts) {
  if (views.empty()) throw std::invalid_argument("objective: no views");
  if (opts.alpha != 0 && opts.alpha != 1) throw std::invalid_argument("objective: alpha must be 0 or 1");
  if (opts.alpha == 1 && views.size() < 2) throw std::invalid_argument("objective: contrastive term needs K >= 2");

  Forward f;
  f.transformed = transform_features(params.encoder, x);
  double recon = 0.0;
  for (const auto& v : views) {
    f.tapes.push_back(propagate(params.encoder, f.transformed, *v.adjacency));
    f.scores.push_back(score_edges(f.tapes.back().z, *v.positives, v.negatives));
    const double lk = v.weight * subgraph_recon_loss(f.scores.back());
    f.loss.per_subgraph.push_back(lk);
    recon += lk;
  }
  f.loss.recon = recon / static_cast<double>(views.size());
  f.loss.alpha = opts.alpha;
  f.loss.tau = opts.ntxent.tau;
  if (opts.alpha == 1) {
    for (const auto& t : f.tapes) f.projections.push_back(projection_forward_tape(params.projection, t.z));
  }
  return f;
}

void check_finite(const LossBreakdown& loss) {
  if (std::isfinite(loss.total)) return;
  std::ostringstream msg;
  msg << "non-finite loss: total=" << loss.total << " recon=" << loss.recon << " contrastive=" << loss.contrastive
      << " per_subgraph=[";
  for (std::size_t i = 0; i < loss.per_subgraph.size(); ++i) msg << (i ? "," : "") << loss.per_subgraph[i];
  msg << "]";
  throw NumericalError(msg.str());
}

}  // namespace

ObjectiveResult compute_gradients(const ModelParams& params, const Matrix& x, std::span<const ReconView> views,
                                  const ObjectiveOptions& opts) {
  Forward f = run_forward(params, x, views, opts);
  const std::size_t k = views.size();

  ObjectiveResult out;
  out.grads = params.zeros_like();

  std::vector<Matrix> dz;
  dz.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    dz.emplace_back(f.tapes[i].z.rows(), f.tapes[i].z.cols());
    accumulate_recon_grad(f.tapes[i].z, *views[i].positives, views[i].negatives, f.scores[i],
                          views[i].weight / static_cast<double>(k), dz[i]);
  }

  if (opts.alpha == 1) {
    std::vector<Matrix> hs;
    for (const auto& p : f.projections) hs.push_back(p.h);
    ContrastiveResult c = contrastive_loss_with_grad(hs, opts.ntxent);
    f.loss.contrastive = c.value;
    out.zero_norm_rows = c.zero_norm_rows;
    for (std::size_t i = 0; i < k; ++i)
      add_inplace(dz[i], projection_backward(params.projection, f.tapes[i].z, f.projections[i], c.grads[i],
                                             out.grads.projection));
  }
  f.loss.total = total_loss(f.loss.recon, f.loss.contrastive, opts.alpha);
  check_finite(f.loss);

  Matrix dtransformed(f.transformed.rows(), f.transformed.cols());
  for (std::size_t i = 0; i < k; ++i)
    add_inplace(dtransformed, propagate_backward(params.encoder, f.tapes[i], *views[i].adjacency, dz[i],
                                                 out.grads.encoder));
  transform_backward(params.encoder, x, dtransformed, out.grads.encoder);

  out.loss = std::move(f.loss);
  for (auto& t : f.tapes) out.embeddings.push_back(std::move(t.z));
  return out;
}

LossBreakdown evaluate_objective(const ModelParams& params, const Matrix& x, std::span<const ReconView> views,
                                 const ObjectiveOptions& opts) {
  Forward f = run_forward(params, x, views, opts);
  if (opts.alpha == 1) {
    std::vector<Matrix> hs;
    for (const auto& p : f.projections) hs.push_back(p.h);
    f.loss.contrastive = contrastive_loss(hs, opts.ntxent);
  }
  f.loss.total = total_loss(f.loss.recon, f.loss.contrastive, opts.alpha);
  return f.loss;
}

}  // namespace ness
