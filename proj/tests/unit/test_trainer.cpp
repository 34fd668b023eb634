// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>

#include "ness/dataset.hpp"
#include "ness/metrics.hpp"
#include "ness/trainer.hpp"

using namespace ness;

namespace {

Graph small_graph() {
  SbmParams p;
  p.block_sizes = {30, 30};
  p.intra_p = 0.3;
  p.inter_p = 0.02;
  p.feature_dim = 4;
  p.feature_noise = 0.5;
  p.seed = 5;
  return generate_sbm(p).graph;
}

TrainConfig quick(TrainMode mode, std::size_t k = 2) {
  TrainConfig c;
  c.mode = mode;
  c.k = k;
  c.max_epochs = 40;
  c.patience = 5;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("single-subgraph NESS without drop-edge reproduces SGAE exactly") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 1);
  const Partition p = partition_k(s.train, g.num_nodes(), 1, 1);
  for (auto kind : {EncoderKind::Gcn, EncoderKind::Lin, EncoderKind::Gnae}) {
    TrainConfig ness = quick(TrainMode::Ness, 1), sgae = quick(TrainMode::Sgae);
    ness.drop_p = sgae.drop_p = 0.0;
    ness.encoder = sgae.encoder = kind;
    const TrainResult a = train(ness, g, s, &p);
    const TrainResult b = train(sgae, g, s);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.validation_history == b.validation_history);
    CHECK(a.best_params == b.best_params);
    CHECK(a.embedding == b.embedding);
  }
}

TEST_CASE("training is deterministic") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 2);
  const Partition p = partition_k(s.train, g.num_nodes(), 4, 2);
  TrainConfig c = quick(TrainMode::Ness, 4);
  const TrainResult a = train(c, g, s, &p), b = train(c, g, s, &p);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.best_params == b.best_params);
  c.seed = 4;
  CHECK_FALSE(train(c, g, s, &p).loss_history == a.loss_history);
}

TEST_CASE("early stopping contract") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 3);
  for (auto mode : {TrainMode::Sgae, TrainMode::Ds, TrainMode::Fgae, TrainMode::Dres}) {
    TrainConfig c = quick(mode);
    c.max_epochs = 200;
    const TrainResult r = train(c, g, s);
    CHECK(r.epochs_run() <= c.max_epochs);
    CHECK(r.validation_history.size() == r.epochs_run());
    REQUIRE(r.best_epoch >= 1);
    const double best = r.validation_history[r.best_epoch - 1].loss;
    for (const auto& v : r.validation_history) CHECK(best <= v.loss);
    if (r.epochs_run() < c.max_epochs) CHECK(r.epochs_run() == r.best_epoch + c.patience);
    for (const auto& l : r.loss_history) CHECK(std::isfinite(l.total));
  }
}

TEST_CASE("returned embedding is the test-time embedding of the best parameters") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 4);
  const Partition p = partition_k(s.train, g.num_nodes(), 2, 4);
  const TrainConfig c = quick(TrainMode::Ness);
  const TrainResult r = train(c, g, s, &p);
  const InferenceInputs in = prepare_inference(c, g, s, &p);
  CHECK(r.embedding == test_time_embedding(c, r.best_params, in));
  CHECK(r.subgraph_embeddings == subgraph_embeddings(r.best_params, in));
  CHECK(r.embedding == aggregate(r.subgraph_embeddings, Aggregation::Mean));
  const TrainConfig sg = quick(TrainMode::Sgae);
  const TrainResult d = train(sg, g, s);
  CHECK(d.embedding == direct_embedding(d.best_params, prepare_inference(sg, g, s, nullptr)));
  CHECK(d.subgraph_embeddings.empty());
}

TEST_CASE("other settings train") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 5);
  const Partition p = partition_k(s.train, g.num_nodes(), 2, 5);
  TrainConfig c = quick(TrainMode::Ness);
  c.alpha = 1;
  const TrainResult r = train(c, g, s, &p);
  CHECK(r.loss_history[0].contrastive > 0.0);
  c.alpha = 0;
  c.recon_target = ReconTarget::Full;
  c.selection = Selection::ValAuc;
  c.feature_norm = FeatureNorm::Row;
  c.use_bias = true;
  c.encoder = EncoderKind::Gcn;
  c.weight_decay = 0.01;
  CHECK(train(c, g, s, &p).epochs_run() > 0);
  TrainConfig dres = quick(TrainMode::Dres, 3);
  dres.alpha = 1;
  CHECK(train(dres, g, s).loss_history[0].per_subgraph.size() == 3);
}

TEST_CASE("partition rules") {
  const Graph g = small_graph();
  const Split s = res_split(g, {}, 6);
  const Partition p2 = partition_k(s.train, g.num_nodes(), 2, 6);
  CHECK_THROWS_AS(train(quick(TrainMode::Ness), g, s), std::invalid_argument);
  CHECK_THROWS_AS(train(quick(TrainMode::Ness, 4), g, s, &p2), std::invalid_argument);
  CHECK_THROWS_AS(train(quick(TrainMode::Sgae), g, s, &p2), std::invalid_argument);
  CHECK_THROWS_AS(train(quick(TrainMode::Dres), g, s, &p2), std::invalid_argument);
  TrainConfig bad = quick(TrainMode::Sgae);
  bad.alpha = 1;
  CHECK_THROWS_AS(train(bad, g, s), std::invalid_argument);
}

TEST_CASE("divergence aborts with the history so far") {
  Matrix x(20, 2);
  for (std::size_t i = 0; i < 20; ++i) x(i, i % 2) = 1e200;
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < 20; ++i) e.push_back({i, i + 1});
  const Graph g = build_graph(x, e);
  const Split s = res_split(g, {0.7, 0.1, 0.2}, 1);
  TrainConfig c = quick(TrainMode::Sgae);
  c.encoder = EncoderKind::Lin;
  try {
    train(c, g, s);
    FAIL("expected divergence");
  } catch (const TrainingDiverged& d) {
    CHECK(d.history().empty());
  }
}
