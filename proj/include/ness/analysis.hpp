// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subgraph analyses of a trained model: inter-subgraph correlation,
// consensus, gradual aggregation, score ensembling and aggregation versus
// direct encoding of the whole training graph.

#include <span>
#include <string>
#include <vector>

#include "ness/encoders.hpp"
#include "ness/metrics.hpp"
#include "ness/splitter.hpp"
#include "ness/trainer.hpp"

namespace ness {

/// Mean embedding of the nodes incident to at least one edge of `edges`.
std::vector<double> subgraph_mean_representation(const Matrix& z, const EdgeSet& edges);

struct PearsonMatrix {
  /// K x K, symmetric, unit diagonal; NaN where a vector has zero variance.
  Matrix r;
  /// Mean over defined off-diagonal pairs (NaN when none is defined).
  double mean = 0.0;
  std::size_t undefined_pairs = 0;
};

PearsonMatrix pairwise_pearson(std::span<const std::vector<double>> vectors);

/// Fraction of test items classified correctly by z_k with sigmoid(logit) >
/// threshold for positives and <= threshold for negatives.
double threshold_accuracy(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg, double threshold = 0.5);

/// Fraction of the |pos| + |neg| items classified correctly under every z_k.
double consensus(std::span<const Matrix> embeddings, const EdgeSet& pos, const EdgeSet& neg,
                 double threshold = 0.5);

/// Entry m-1 is the AUC of mean(z_1..z_m).
std::vector<double> gradual_aggregation_curve(std::span<const Matrix> embeddings, const EdgeSet& pos,
                                              const EdgeSet& neg);

/// Scores each edge by the mean over k of sigmoid(z_k,u . z_k,v).
MetricReport ensemble_baseline(std::span<const Matrix> embeddings, const EdgeSet& pos, const EdgeSet& neg);

struct AggregationVsDirect {
  double auc_agg = 0.0;
  double auc_direct = 0.0;
  double delta = 0.0;
};

AggregationVsDirect aggregation_vs_direct(const ModelParams& params, const InferenceInputs& inputs,
                                          const EdgeSet& pos, const EdgeSet& neg);

struct SubgraphAnalysis {
  std::vector<std::vector<double>> mean_representations;
  PearsonMatrix pearson;
  double consensus_ratio = 0.0;
  double consensus_threshold = 0.5;
  std::vector<double> per_subgraph_auc;
  std::vector<double> per_subgraph_accuracy;
  std::vector<double> gradual_auc;
  double aggregate_auc = 0.0;
  MetricReport ensemble;
  AggregationVsDirect agg_vs_direct;
};

/// Runs every analysis on the static subgraphs in `partition`.
SubgraphAnalysis analyze_subgraphs(const ModelParams& params, const InferenceInputs& inputs,
                                   const Partition& partition, const EdgeSet& pos, const EdgeSet& neg,
                                   double threshold = 0.5);

/// One object per figure analogue: fig3a, fig3b, fig3c, fig4a, fig5.
std::string analysis_json(const SubgraphAnalysis& analysis);
/// Flat rows "section,index,value".
std::string analysis_csv(const SubgraphAnalysis& analysis);

}  // namespace ness
