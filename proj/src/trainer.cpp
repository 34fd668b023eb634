// SPDX-License-Identifier: Apache-2.0
#include "ness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ness/metrics.hpp"
#include "ness/objective.hpp"
#include "ness/optim.hpp"

namespace ness {
namespace {

void check_partition_use(const TrainConfig& c, const Partition* partition) {
  if (c.mode == TrainMode::Ness) {
    if (!partition || partition->k() == 0) throw std::invalid_argument("train: ness mode needs a static partition");
    if (partition->k() != c.k)
      throw std::invalid_argument("train: partition has " + std::to_string(partition->k()) + " subgraphs but k = " +
                                  std::to_string(c.k));
  } else if (partition) {
    throw std::invalid_argument("train: a static partition is only valid in ness mode");
  }
}

// Edges and adjacencies of the current epoch. `views` point into the
// storage of this struct, so it is neither copied nor moved once filled.
struct EpochViews {
  std::vector<Subgraph> subgraphs;  // encoder inputs
  std::vector<EdgeSet> targets;     // decoder positives
  std::vector<NormalizedAdjacency> adjacencies;
  std::vector<ReconView> views;
};

class EpochBuilder {
 public:
  EpochBuilder(const TrainConfig& c, const Graph& g, const Split& s, const Partition* p)
      : config_(c),
        n_(g.num_nodes()),
        split_(s),
        partition_(p),
        train_lookup_(s.train),
        full_train_(make_subgraph(0, g.num_nodes(), s.train)),
        full_train_adj_(normalize_adjacency(full_train_.adjacency)),
        drop_rng_(make_stream(c.seed, "dropedge")),
        neg_rng_(make_stream(c.seed, "negsample")),
        sampler_rng_(make_stream(c.seed, "sampler")) {}

  void build(EpochViews& out) {
    out = {};
    switch (config_.mode) {
      case TrainMode::Ness:
        for (const auto& sg : partition_->subgraphs)
          add(out, drop_edges(sg, config_.drop_p, drop_rng_), target_for(sg.edges));
        break;
      case TrainMode::Sgae:
        add(out, drop_edges(full_train_, config_.drop_p, drop_rng_), split_.train);
        break;
      case TrainMode::Ds: {
        Subgraph sg = dynamic_res_sample(split_.train, n_, config_.ds_fraction, sampler_rng_);
        EdgeSet target = target_for(sg.edges);
        add(out, std::move(sg), std::move(target));
        break;
      }
      case TrainMode::Fgae: {
        Subgraph sampled = dynamic_res_sample(split_.train, n_, config_.ds_fraction, sampler_rng_);
        add(out, full_train_, sampled.edges);
        break;
      }
      case TrainMode::Dres: {
        Partition p = dynamic_res_partition(split_.train, n_, config_.k, sampler_rng_);
        for (auto& sg : p.subgraphs) {
          EdgeSet target = target_for(sg.edges);
          add(out, std::move(sg), std::move(target));
        }
        break;
      }
    }
    // Storage is complete; now take addresses.
    for (std::size_t i = 0; i < out.subgraphs.size(); ++i) {
      const bool reuse_full = config_.mode == TrainMode::Fgae ||
                              (config_.mode == TrainMode::Sgae && config_.drop_p == 0.0);
      out.adjacencies.push_back(reuse_full ? full_train_adj_ : normalize_adjacency(out.subgraphs[i].adjacency));
    }
    for (std::size_t i = 0; i < out.subgraphs.size(); ++i) {
      ReconView v;
      v.adjacency = &out.adjacencies[i];
      v.positives = &out.targets[i];
      v.negatives = negative_sample(train_lookup_, split_.train.size(), out.targets[i].size(), n_, neg_rng_);
      out.views.push_back(std::move(v));
    }
  }

 private:
  EdgeSet target_for(const EdgeSet& own) const {
    return config_.recon_target == ReconTarget::Full ? split_.train : own;
  }

  static void add(EpochViews& out, Subgraph sg, EdgeSet target) {
    out.subgraphs.push_back(std::move(sg));
    out.targets.push_back(std::move(target));
  }

  const TrainConfig& config_;
  std::size_t n_;
  const Split& split_;
  const Partition* partition_;
  EdgeLookup train_lookup_;
  Subgraph full_train_;
  NormalizedAdjacency full_train_adj_;
  Rng drop_rng_;
  Rng neg_rng_;
  Rng sampler_rng_;
};

ValidationRecord validate(const Matrix& z, const Split& split) {
  if (split.val_pos.empty()) return {};
  const EdgeScores s = score_edges(z, split.val_pos, split.val_neg);
  return {subgraph_recon_loss(s), auc(s.pos_logits, s.neg_logits)};
}

}  // namespace

InferenceInputs prepare_inference(const TrainConfig& config, const Graph& graph, const Split& split,
                                  const Partition* partition) {
  InferenceInputs in;
  in.features = config.feature_norm == FeatureNorm::Row ? graph.with_row_normalized_features().features()
                                                        : graph.features();
  in.train_adjacency = normalize_adjacency(adjacency_from_edges(graph.num_nodes(), split.train));
  if (partition)
    for (const auto& sg : partition->subgraphs) in.subgraph_adjacencies.push_back(normalize_adjacency(sg.adjacency));
  return in;
}

std::vector<Matrix> subgraph_embeddings(const ModelParams& params, const InferenceInputs& inputs) {
  const Matrix transformed = transform_features(params.encoder, inputs.features);
  std::vector<Matrix> out;
  for (const auto& adj : inputs.subgraph_adjacencies) out.push_back(propagate(params.encoder, transformed, adj).z);
  return out;
}

Matrix direct_embedding(const ModelParams& params, const InferenceInputs& inputs) {
  return encoder_forward(params.encoder, inputs.features, inputs.train_adjacency);
}

Matrix test_time_embedding(const TrainConfig& config, const ModelParams& params, const InferenceInputs& inputs) {
  if (config.mode == TrainMode::Ness) return aggregate(subgraph_embeddings(params, inputs), Aggregation::Mean);
  return direct_embedding(params, inputs);
}

TrainResult train(const TrainConfig& config, const Graph& graph, const Split& split, const Partition* partition) {
  config.validate();
  check_partition_use(config, partition);
  if (split.train.empty()) throw std::invalid_argument("train: empty training edge set");

  const InferenceInputs inputs = prepare_inference(config, graph, split, partition);
  ModelParams params = init_model(config.encoder, graph.feature_dim(), config.seed, config.use_bias,
                                  {config.hidden_dim, config.out_dim});
  AdamW optimizer({config.lr, config.beta1, config.beta2, config.eps, config.weight_decay});
  ObjectiveOptions objective{config.alpha, {config.tau, config.in_view_negatives}};
  EpochBuilder builder(config, graph, split, partition);

  TrainResult result;
  result.best_params = params;
  double best_metric = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochViews ev;
    builder.build(ev);

    ObjectiveResult step;
    try {
      step = compute_gradients(params, inputs.features, ev.views, objective);
      optimizer.step(params.tensors(), step.grads.tensors());
    } catch (const NumericalError& e) {
      throw TrainingDiverged(std::string("epoch ") + std::to_string(epoch) + ": " + e.what(), result.loss_history);
    }
    result.loss_history.push_back(step.loss);

    const ValidationRecord val = validate(test_time_embedding(config, params, inputs), split);
    result.validation_history.push_back(val);
    result.wall_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    if (!std::isfinite(val.loss))
      throw TrainingDiverged("epoch " + std::to_string(epoch) + ": non-finite validation loss", result.loss_history);

    const double metric = split.val_pos.empty() ? -static_cast<double>(epoch)
                          : config.selection == Selection::ValLoss ? val.loss
                                                                   : -val.auc;
    if (metric < best_metric) {
      best_metric = metric;
      result.best_params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  if (config.mode == TrainMode::Ness) result.subgraph_embeddings = subgraph_embeddings(result.best_params, inputs);
  result.embedding = config.mode == TrainMode::Ness ? aggregate(result.subgraph_embeddings, Aggregation::Mean)
                                                    : direct_embedding(result.best_params, inputs);
  return result;
}

}  // namespace ness
