// SPDX-License-Identifier: Apache-2.0
#include "ness/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "ness/losses.hpp"

namespace ness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_nonempty(std::span<const Matrix> embeddings, const char* what) {
  if (embeddings.empty()) throw std::invalid_argument(std::string(what) + ": no embeddings");
}

std::vector<bool> correct_items(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg, double threshold) {
  std::vector<bool> ok;
  ok.reserve(pos.size() + neg.size());
  for (double s : decode_edges(z, pos)) ok.push_back(s > threshold);
  for (double s : decode_edges(z, neg)) ok.push_back(s <= threshold);
  return ok;
}

nlohmann::ordered_json number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::vector<double> subgraph_mean_representation(const Matrix& z, const EdgeSet& edges) {
  std::vector<bool> connected(z.rows(), false);
  for (const Edge& e : edges) {
    if (e.v >= z.rows()) throw std::invalid_argument("subgraph_mean_representation: node out of range");
    connected[e.u] = connected[e.v] = true;
  }
  std::vector<double> mean(z.cols(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (!connected[i]) continue;
    ++count;
    for (std::size_t c = 0; c < z.cols(); ++c) mean[c] += z(i, c);
  }
  if (count == 0) throw std::invalid_argument("subgraph_mean_representation: no connected nodes");
  for (double& m : mean) m /= static_cast<double>(count);
  return mean;
}

PearsonMatrix pairwise_pearson(std::span<const std::vector<double>> vectors) {
  const std::size_t k = vectors.size();
  if (k == 0) throw std::invalid_argument("pairwise_pearson: no vectors");
  const std::size_t d = vectors[0].size();
  if (d < 2) throw std::invalid_argument("pairwise_pearson: need at least 2 coordinates");
  std::vector<std::vector<double>> centered(k);
  std::vector<double> norms(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (vectors[i].size() != d) throw std::invalid_argument("pairwise_pearson: width mismatch");
    double mean = 0.0;
    for (double x : vectors[i]) mean += x;
    mean /= static_cast<double>(d);
    double ss = 0.0;
    for (double x : vectors[i]) {
      centered[i].push_back(x - mean);
      ss += (x - mean) * (x - mean);
    }
    norms[i] = std::sqrt(ss);
  }
  PearsonMatrix out{Matrix(k, k, kNaN), 0.0, 0};
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (norms[i] > 0.0) out.r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (norms[i] == 0.0 || norms[j] == 0.0) {
        ++out.undefined_pairs;
        continue;
      }
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += centered[i][c] * centered[j][c];
      const double r = dot / (norms[i] * norms[j]);
      out.r(i, j) = out.r(j, i) = r;
      sum += r;
      ++defined;
    }
  }
  out.mean = defined ? sum / static_cast<double>(defined) : kNaN;
  return out;
}

double threshold_accuracy(const Matrix& z, const EdgeSet& pos, const EdgeSet& neg, double threshold) {
  const auto ok = correct_items(z, pos, neg, threshold);
  if (ok.empty()) throw std::invalid_argument("threshold_accuracy: no items");
  std::size_t hits = 0;
  for (bool b : ok) hits += b;
  return static_cast<double>(hits) / static_cast<double>(ok.size());
}

double consensus(std::span<const Matrix> embeddings, const EdgeSet& pos, const EdgeSet& neg, double threshold) {
  require_nonempty(embeddings, "consensus");
  const std::size_t n = pos.size() + neg.size();
  if (n == 0) throw std::invalid_argument("consensus: no items");
  std::vector<bool> all(n, true);
  for (const Matrix& z : embeddings) {
    const auto ok = correct_items(z, pos, neg, threshold);
    for (std::size_t i = 0; i < n; ++i) all[i] = all[i] && ok[i];
  }
  std::size_t hits = 0;
  for (bool b : all) hits += b;
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<double> gradual_aggregation_curve(std::span<const Matrix> embeddings, const EdgeSet& pos,
                                              const EdgeSet& neg) {
  require_nonempty(embeddings, "gradual_aggregation_curve");
  std::vector<double> curve;
  for (std::size_t m = 1; m <= embeddings.size(); ++m) {
    const Matrix z = aggregate(embeddings.first(m), Aggregation::Mean);
    curve.push_back(auc(edge_logits(z, pos), edge_logits(z, neg)));
  }
  return curve;
}

MetricReport ensemble_baseline(std::span<const Matrix> embeddings, const EdgeSet& pos, const EdgeSet& neg) {
  require_nonempty(embeddings, "ensemble_baseline");
  std::vector<double> ps(pos.size(), 0.0), ns(neg.size(), 0.0);
  for (const Matrix& z : embeddings) {
    const auto p = decode_edges(z, pos);
    const auto n = decode_edges(z, neg);
    for (std::size_t i = 0; i < p.size(); ++i) ps[i] += p[i];
    for (std::size_t i = 0; i < n.size(); ++i) ns[i] += n[i];
  }
  const double k = static_cast<double>(embeddings.size());
  for (double& s : ps) s /= k;
  for (double& s : ns) s /= k;
  return metric_report(ps, ns, 0.5);
}

AggregationVsDirect aggregation_vs_direct(const ModelParams& params, const InferenceInputs& inputs,
                                          const EdgeSet& pos, const EdgeSet& neg) {
  const auto zs = subgraph_embeddings(params, inputs);
  require_nonempty(zs, "aggregation_vs_direct");
  const Matrix agg = aggregate(zs, Aggregation::Mean);
  const Matrix direct = direct_embedding(params, inputs);
  AggregationVsDirect out;
  out.auc_agg = auc(edge_logits(agg, pos), edge_logits(agg, neg));
  out.auc_direct = auc(edge_logits(direct, pos), edge_logits(direct, neg));
  out.delta = out.auc_agg - out.auc_direct;
  return out;
}

SubgraphAnalysis analyze_subgraphs(const ModelParams& params, const InferenceInputs& inputs,
                                   const Partition& partition, const EdgeSet& pos, const EdgeSet& neg,
                                   double threshold) {
  if (partition.k() != inputs.subgraph_adjacencies.size())
    throw std::invalid_argument("analyze_subgraphs: partition does not match the inference inputs");
  const auto zs = subgraph_embeddings(params, inputs);
  SubgraphAnalysis a;
  a.consensus_threshold = threshold;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    a.mean_representations.push_back(subgraph_mean_representation(zs[k], partition.subgraphs[k].edges));
    a.per_subgraph_auc.push_back(auc(edge_logits(zs[k], pos), edge_logits(zs[k], neg)));
    a.per_subgraph_accuracy.push_back(threshold_accuracy(zs[k], pos, neg, threshold));
  }
  a.pearson = pairwise_pearson(a.mean_representations);
  a.consensus_ratio = consensus(zs, pos, neg, threshold);
  a.gradual_auc = gradual_aggregation_curve(zs, pos, neg);
  a.aggregate_auc = a.gradual_auc.back();
  a.ensemble = ensemble_baseline(zs, pos, neg);
  a.agg_vs_direct = aggregation_vs_direct(params, inputs, pos, neg);
  return a;
}

std::string analysis_json(const SubgraphAnalysis& a) {
  using Json = nlohmann::ordered_json;
  Json pearson = Json::array();
  for (std::size_t i = 0; i < a.pearson.r.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < a.pearson.r.cols(); ++j) row.push_back(number(a.pearson.r(i, j)));
    pearson.push_back(std::move(row));
  }
  Json j;
  j["k"] = a.per_subgraph_auc.size();
  j["fig3a"] = {{"mean_pairwise_pearson", number(a.pearson.mean)},
                {"undefined_pairs", a.pearson.undefined_pairs},
                {"pearson", std::move(pearson)},
                {"mean_representations", a.mean_representations}};
  j["fig3b"] = {{"consensus_ratio", a.consensus_ratio},
                {"threshold", a.consensus_threshold},
                {"per_subgraph_accuracy", a.per_subgraph_accuracy}};
  j["fig3c"] = {{"per_subgraph_auc", a.per_subgraph_auc}, {"aggregate_auc", a.aggregate_auc}};
  j["fig4a"] = {{"auc_agg", a.agg_vs_direct.auc_agg},
                {"auc_direct", a.agg_vs_direct.auc_direct},
                {"delta", a.agg_vs_direct.delta}};
  j["fig5"] = {{"gradual_auc", a.gradual_auc}, {"ensemble_auc", a.ensemble.auc}, {"ensemble_ap", a.ensemble.ap}};
  return j.dump(2) + "\n";
}

std::string analysis_csv(const SubgraphAnalysis& a) {
  std::string out = "section,index,value\n";
  char buf[64];
  auto row = [&](const char* section, std::size_t index, double value) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", index, value);
    out += section;
    out += ',';
    out += buf;
  };
  row("mean_pairwise_pearson", 0, a.pearson.mean);
  row("consensus_ratio", 0, a.consensus_ratio);
  for (std::size_t i = 0; i < a.per_subgraph_auc.size(); ++i) row("per_subgraph_auc", i, a.per_subgraph_auc[i]);
  for (std::size_t i = 0; i < a.per_subgraph_accuracy.size(); ++i)
    row("per_subgraph_accuracy", i, a.per_subgraph_accuracy[i]);
  for (std::size_t i = 0; i < a.gradual_auc.size(); ++i) row("gradual_auc", i + 1, a.gradual_auc[i]);
  row("aggregate_auc", 0, a.aggregate_auc);
  row("ensemble_auc", 0, a.ensemble.auc);
  row("auc_agg", 0, a.agg_vs_direct.auc_agg);
  row("auc_direct", 0, a.agg_vs_direct.auc_direct);
  row("agg_minus_direct", 0, a.agg_vs_direct.delta);
  return out;
}

}  // namespace ness
