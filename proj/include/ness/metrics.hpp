// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ness/graph.hpp"
#include "ness/matrix.hpp"

namespace ness {

enum class Aggregation { Mean, Sum, Min, Max };
Aggregation parse_aggregation(std::string_view text);

/// Elementwise reduction of equally shaped embeddings. The K values of each
/// entry are reduced in sorted order, so the result is bit-identical under
/// any permutation of the inputs; K equal values reduce to that value for
/// mean/min/max.
Matrix aggregate(std::span<const Matrix> embeddings, Aggregation method = Aggregation::Mean);

/// P(score_pos > score_neg) with ties counted 1/2, via sorted midranks.
double auc(std::span<const double> pos, std::span<const double> neg);

/// sum_n (R_n - R_{n-1}) P_n over descending distinct thresholds.
double average_precision(std::span<const double> pos, std::span<const double> neg);

struct MetricReport {
  double auc = 0.0;
  double ap = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::optional<double> threshold_accuracy;
};

MetricReport metric_report(std::span<const double> pos, std::span<const double> neg,
                           std::optional<double> threshold = 0.5);

/// Ranks the edge sets by decoder logit z_u . z_v; threshold accuracy uses
/// sigmoid(logit) > 0.5.
MetricReport evaluate_embedding(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg);

}  // namespace ness
