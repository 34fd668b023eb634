// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ness/config.hpp"
#include "ness/encoders.hpp"
#include "ness/error.hpp"
#include "ness/losses.hpp"
#include "ness/splitter.hpp"

namespace ness {

struct ValidationRecord {
  double loss = 0.0;
  double auc = 0.0;

  bool operator==(const ValidationRecord&) const = default;
};

struct TrainResult {
  ModelParams best_params;
  std::size_t best_epoch = 0;  ///< 1-based
  std::vector<LossBreakdown> loss_history;
  std::vector<ValidationRecord> validation_history;
  std::vector<double> wall_ms;
  /// Static-subgraph embeddings at the best epoch (NESS only).
  std::vector<Matrix> subgraph_embeddings;
  /// Test-time embedding at the best epoch.
  Matrix embedding;

  std::size_t epochs_run() const { return loss_history.size(); }
};

/// Thrown when the loss or a gradient becomes non-finite. Carries the history
/// recorded up to the failing epoch.
class TrainingDiverged : public NumericalError {
 public:
  TrainingDiverged(const std::string& what, std::vector<LossBreakdown> history)
      : NumericalError(what), history_(std::move(history)) {}
  const std::vector<LossBreakdown>& history() const { return history_; }

 private:
  std::vector<LossBreakdown> history_;
};

/// Inputs shared by evaluation and analysis: possibly normalized features,
/// the normalized training adjacency and the normalized static subgraphs.
struct InferenceInputs {
  Matrix features;
  NormalizedAdjacency train_adjacency;
  std::vector<NormalizedAdjacency> subgraph_adjacencies;
};

InferenceInputs prepare_inference(const TrainConfig& config, const Graph& graph, const Split& split,
                                  const Partition* partition);

/// z_k = E(X, a_k) for every static subgraph.
std::vector<Matrix> subgraph_embeddings(const ModelParams& params, const InferenceInputs& inputs);
/// Z = E(X, A_train).
Matrix direct_embedding(const ModelParams& params, const InferenceInputs& inputs);
/// Mean of the subgraph embeddings for NESS, the direct embedding otherwise.
Matrix test_time_embedding(const TrainConfig& config, const ModelParams& params, const InferenceInputs& inputs);

/// Full-batch training, one AdamW step per epoch, early stopping on the
/// validation metric and restoration of the best parameters.
///
/// `partition` is required for NESS (static subgraphs) and must be null for
/// the other modes. Throws std::invalid_argument on an invalid combination and
/// TrainingDiverged on a non-finite loss.
TrainResult train(const TrainConfig& config, const Graph& graph, const Split& split,
                  const Partition* partition = nullptr);

}  // namespace ness
