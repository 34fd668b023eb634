// SPDX-License-Identifier: Apache-2.0
#include "ness/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ness/losses.hpp"

namespace ness {
namespace {

void check_nonempty(std::span<const double> pos, std::span<const double> neg, const char* what) {
  if (pos.empty() || neg.empty()) throw std::invalid_argument(std::string(what) + ": empty score list");
}

}  // namespace

Aggregation parse_aggregation(std::string_view text) {
  if (text == "mean") return Aggregation::Mean;
  if (text == "sum") return Aggregation::Sum;
  if (text == "min") return Aggregation::Min;
  if (text == "max") return Aggregation::Max;
  throw std::invalid_argument("unknown aggregation '" + std::string(text) + "'");
}

Matrix aggregate(std::span<const Matrix> embeddings, Aggregation method) {
  if (embeddings.empty()) throw std::invalid_argument("aggregate: no embeddings");
  const Matrix& first = embeddings.front();
  for (const auto& z : embeddings)
    if (!same_shape(z, first)) throw std::invalid_argument("aggregate: shape mismatch");
  const std::size_t k = embeddings.size();
  Matrix out(first.rows(), first.cols());
  std::vector<double> vals(k);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) vals[j] = embeddings[j].data()[i];
    std::sort(vals.begin(), vals.end());
    double r = 0.0;
    switch (method) {
      case Aggregation::Min: r = vals.front(); break;
      case Aggregation::Max: r = vals.back(); break;
      case Aggregation::Sum: r = std::accumulate(vals.begin(), vals.end(), 0.0); break;
      case Aggregation::Mean:
        r = vals.front() == vals.back() ? vals.front()
                                        : std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(k);
        break;
    }
    out.data()[i] = r;
  }
  return out;
}

double auc(std::span<const double> pos, std::span<const double> neg) {
  check_nonempty(pos, neg, "auc");
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(pos.size() + neg.size());
  for (double s : pos) items.push_back({s, true});
  for (double s : neg) items.push_back({s, false});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sum of (1-based) midranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    std::size_t npos = 0;
    while (j < items.size() && items[j].score == items[i].score) npos += items[j++].positive ? 1 : 0;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += midrank * static_cast<double>(npos);
    i = j;
  }
  const double np = static_cast<double>(pos.size());
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(neg.size()));
}

double average_precision(std::span<const double> pos, std::span<const double> neg) {
  check_nonempty(pos, neg, "average_precision");
  std::vector<std::pair<double, bool>> items;
  items.reserve(pos.size() + neg.size());
  for (double s : pos) items.emplace_back(s, true);
  for (double s : neg) items.emplace_back(s, false);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const double np = static_cast<double>(pos.size());
  std::size_t tp = 0, fp = 0;
  double prev_recall = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    const double t = items[i].first;
    while (i < items.size() && items[i].first == t) (items[i++].second ? tp : fp) += 1;
    const double recall = static_cast<double>(tp) / np;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

MetricReport metric_report(std::span<const double> pos, std::span<const double> neg, std::optional<double> threshold) {
  MetricReport r;
  r.auc = auc(pos, neg);
  r.ap = average_precision(pos, neg);
  r.n_pos = pos.size();
  r.n_neg = neg.size();
  if (threshold) {
    std::size_t correct = 0;
    for (double s : pos) correct += s > *threshold ? 1 : 0;
    for (double s : neg) correct += s <= *threshold ? 1 : 0;
    r.threshold_accuracy = static_cast<double>(correct) / static_cast<double>(pos.size() + neg.size());
  }
  return r;
}

MetricReport evaluate_embedding(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg) {
  // Ranking on logits avoids ties from sigmoid saturation; logit > 0 is
  // equivalent to score > 0.5.
  return metric_report(edge_logits(z, pos), edge_logits(z, neg), 0.0);
}

}  // namespace ness
