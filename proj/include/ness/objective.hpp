// SPDX-License-Identifier: Apache-2.0
#pragma once

// Total training objective for one epoch and its exact gradient.
//
// Every view is encoded with the same parameters. The reconstruction term of
// view k scores `positives` against `negatives` on z_k; with alpha = 1 the
// projected embeddings of all views also enter the NT-Xent term.

#include <span>
#include <vector>

#include "ness/encoders.hpp"
#include "ness/losses.hpp"

namespace ness {

struct ReconView {
  const NormalizedAdjacency* adjacency = nullptr;  ///< encoder input
  const EdgeSet* positives = nullptr;              ///< decoder targets
  EdgeSet negatives;
  double weight = 1.0;
};

struct ObjectiveOptions {
  int alpha = 0;
  NtXentOptions ntxent;
};

struct ObjectiveResult {
  LossBreakdown loss;
  ModelParams grads;
  std::vector<Matrix> embeddings;
  std::size_t zero_norm_rows = 0;
};

/// Forward and reverse pass. Gradients of all views are summed in ascending
/// view order. Throws NumericalError on a non-finite loss.
ObjectiveResult compute_gradients(const ModelParams& params, const Matrix& x, std::span<const ReconView> views,
                                  const ObjectiveOptions& opts);

/// Forward pass only.
LossBreakdown evaluate_objective(const ModelParams& params, const Matrix& x, std::span<const ReconView> views,
                                 const ObjectiveOptions& opts);

}  // namespace ness
