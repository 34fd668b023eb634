// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "ness/encoders.hpp"
#include "ness/kernels.hpp"
#include "oracles.hpp"

using namespace ness;

namespace {

oracle::Dense bias_rows(oracle::Dense m, const Matrix& b) {
  for (auto& row : m)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b(0, c);
  return m;
}

}  // namespace

TEST_CASE("initialization shapes and Glorot range") {
  Rng rng(1);
  const EncoderParams gcn = init_encoder(EncoderKind::Gcn, 10, rng, true);
  REQUIRE(gcn.weights.size() == 2);
  CHECK(gcn.weights[0].rows() == 10);
  CHECK(gcn.weights[0].cols() == 64);
  CHECK(gcn.weights[1].rows() == 64);
  CHECK(gcn.weights[1].cols() == 32);
  CHECK(gcn.biases.size() == 2);
  CHECK(gcn.out_dim() == 32);
  for (auto kind : {EncoderKind::Lin, EncoderKind::Gnae}) {
    const EncoderParams p = init_encoder(kind, 10, rng);
    REQUIRE(p.weights.size() == 1);
    CHECK(p.weights[0].cols() == 32);
    CHECK(p.biases.empty());
  }
  const double bound = std::sqrt(6.0 / (10 + 64));
  for (double w : gcn.weights[0].values()) CHECK(std::abs(w) <= bound);
  const ModelParams m = init_model(EncoderKind::Gnae, 7, 3);
  CHECK(m.projection.w0.rows() == 32);
  CHECK(m.projection.w1.cols() == 32);
  CHECK(m == init_model(EncoderKind::Gnae, 7, 3));
  CHECK_FALSE(m == init_model(EncoderKind::Gnae, 7, 4));
  CHECK(m.tensor_names() == std::vector<std::string>{"encoder.w0", "projection.w0", "projection.w1"});
}

TEST_CASE("LIN on an all-isolated graph is X W exactly") {
  std::mt19937_64 g(2);
  Rng rng(2);
  const EncoderParams p = init_encoder(EncoderKind::Lin, 6, rng);
  const Matrix x = oracle::random_matrix(9, 6, g);
  const auto adj = normalize_adjacency(adjacency_from_edges(9, EdgeSet{}));
  CHECK(encoder_forward(p, x, adj) == matmul(x, p.weights[0]));
}

TEST_CASE("GNAE normalizes rows before propagation") {
  std::mt19937_64 g(3);
  Rng rng(3);
  const EncoderParams p = init_encoder(EncoderKind::Gnae, 5, rng);
  Matrix x = oracle::random_matrix(8, 5, g);
  for (std::size_t c = 0; c < 5; ++c) x(4, c) = 0.0;
  const auto adj = normalize_adjacency(adjacency_from_edges(8, EdgeSet::canonical(oracle::random_edges(8, 0.4, g))));
  const EncoderTape tape = propagate(p, transform_features(p, x), adj);
  for (std::size_t i = 0; i < 8; ++i) {
    double sq = 0.0;
    for (double v : tape.hidden.row(i)) sq += v * v;
    if (i == 4) CHECK(sq == 0.0);
    else CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-12);
  }
  CHECK(tape.z.all_finite());
}

TEST_CASE("forward passes match dense oracles") {
  std::mt19937_64 g(4);
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const auto adj = normalize_adjacency(adjacency_from_edges(3, EdgeSet(path)));
  const auto a = oracle::normalized_adjacency(3, path);
  const Matrix x = oracle::random_matrix(3, 4, g);
  SUBCASE("GCN with hand-set weights and biases") {
    EncoderParams p;
    p.kind = EncoderKind::Gcn;
    p.weights = {Matrix{{1, -1}, {0.5, 0}, {0, 2}, {-1, 1}}, Matrix{{1, 0, 2}, {-1, 1, 0.5}}};
    p.biases = {Matrix{{0.1, -0.2}}, Matrix{{0, 0.3, -0.1}}};
    auto h = oracle::relu(bias_rows(oracle::matmul(a, oracle::matmul(oracle::dense(x), oracle::dense(p.weights[0]))),
                                    p.biases[0]));
    auto z = bias_rows(oracle::matmul(a, oracle::matmul(h, oracle::dense(p.weights[1]))), p.biases[1]);
    CHECK(oracle::max_diff(encoder_forward(p, x, adj), z) < 1e-10);
  }
  SUBCASE("LIN and GNAE with random weights") {
    Rng rng(5);
    const EncoderParams lin = init_encoder(EncoderKind::Lin, 4, rng, true);
    CHECK(oracle::max_diff(encoder_forward(lin, x, adj),
                           bias_rows(oracle::matmul(a, oracle::matmul(oracle::dense(x), oracle::dense(lin.weights[0]))),
                                     lin.biases[0])) < 1e-10);
    const EncoderParams gnae = init_encoder(EncoderKind::Gnae, 4, rng);
    auto h = oracle::matmul(oracle::dense(x), oracle::dense(gnae.weights[0]));
    for (auto& row : h) {
      double n = 0.0;
      for (double v : row) n += v * v;
      for (double& v : row) v /= std::sqrt(n);
    }
    CHECK(oracle::max_diff(encoder_forward(gnae, x, adj), oracle::matmul(a, h)) < 1e-10);
  }
}

TEST_CASE("encoder forward is pure and parameters are shared across subgraphs") {
  std::mt19937_64 g(6);
  const ModelParams m = init_model(EncoderKind::Gcn, 5, 1);
  const Matrix x = oracle::random_matrix(10, 5, g);
  const auto a1 = normalize_adjacency(adjacency_from_edges(10, EdgeSet({{0, 1}, {2, 3}})));
  const auto a2 = normalize_adjacency(adjacency_from_edges(10, EdgeSet({{4, 5}})));
  CHECK(encoder_forward(m.encoder, x, a1) == encoder_forward(m.encoder, x, a1));
  const Matrix t = transform_features(m.encoder, x);
  CHECK(propagate(m.encoder, t, a1).z == encoder_forward(m.encoder, x, a1));
  CHECK(propagate(m.encoder, t, a2).z == encoder_forward(m.encoder, x, a2));
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(7);
  const EncoderParams p = init_encoder(EncoderKind::Lin, 4, rng);
  const auto adj = normalize_adjacency(adjacency_from_edges(3, EdgeSet{}));
  CHECK_THROWS(encoder_forward(p, Matrix(3, 5), adj));
  CHECK_THROWS(encoder_forward(p, Matrix(4, 4), adj));
  const ModelParams m = init_model(EncoderKind::Lin, 4, 1);
  CHECK_THROWS(projection_forward(m.projection, Matrix(3, 31)));
}

TEST_CASE("projection head") {
  const ModelParams m = init_model(EncoderKind::Lin, 4, 2);
  CHECK(projection_forward(m.projection, Matrix(5, 32)) == Matrix(5, 32));
  ProjectionParams id{Matrix(32, 32), Matrix(32, 32)};
  for (std::size_t i = 0; i < 32; ++i) id.w0(i, i) = id.w1(i, i) = 1.0;
  std::mt19937_64 g(8);
  const Matrix z = oracle::random_matrix(6, 32, g, 0.0, 1.0);
  CHECK(projection_forward(id, z) == z);
  const Matrix zr = oracle::random_matrix(6, 32, g);
  const auto expect = oracle::matmul(oracle::relu(oracle::matmul(oracle::dense(zr), oracle::dense(m.projection.w0))),
                                     oracle::dense(m.projection.w1));
  CHECK(oracle::max_diff(projection_forward(m.projection, zr), expect) < 1e-10);
}
