// SPDX-License-Identifier: Apache-2.0
#include "ness/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ness/kernels.hpp"

namespace ness {
namespace {

constexpr double kZeroNorm = 1e-12;

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  Matrix w(fan_in, fan_out);
  for (double& x : w.values()) x = dist(rng);
  return w;
}

void add_row_vector(Matrix& m, const Matrix& bias) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += bias(0, c);
  }
}

void relu_inplace(Matrix& m) {
  for (double& x : m.values()) x = std::max(x, 0.0);
}

bool has_bias(const EncoderParams& p) { return !p.biases.empty(); }

}  // namespace

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Gcn: return "gcn";
    case EncoderKind::Lin: return "lin";
    case EncoderKind::Gnae: return "gnae";
  }
  return "?";
}

EncoderKind parse_encoder_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "gcn") return EncoderKind::Gcn;
  if (s == "lin") return EncoderKind::Lin;
  if (s == "gnae") return EncoderKind::Gnae;
  throw std::invalid_argument("unknown encoder kind '" + std::string(text) + "'");
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> t;
  for (auto& w : encoder.weights) t.push_back(&w);
  for (auto& b : encoder.biases) t.push_back(&b);
  t.push_back(&projection.w0);
  t.push_back(&projection.w1);
  return t;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  auto t = const_cast<ModelParams*>(this)->tensors();
  return {t.begin(), t.end()};
}

std::vector<std::string> ModelParams::tensor_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < encoder.weights.size(); ++i) names.push_back("encoder.w" + std::to_string(i));
  for (std::size_t i = 0; i < encoder.biases.size(); ++i) names.push_back("encoder.b" + std::to_string(i));
  names.push_back("projection.w0");
  names.push_back("projection.w1");
  return names;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (Matrix* m : z.tensors()) m->fill(0.0);
  return z;
}

EncoderParams init_encoder(EncoderKind kind, std::size_t feature_dim, Rng& rng, bool use_bias, EncoderShape shape) {
  EncoderParams p;
  p.kind = kind;
  if (kind == EncoderKind::Gcn) {
    p.weights.push_back(glorot(feature_dim, shape.hidden_dim, rng));
    p.weights.push_back(glorot(shape.hidden_dim, shape.out_dim, rng));
  } else {
    p.weights.push_back(glorot(feature_dim, shape.out_dim, rng));
  }
  if (use_bias)
    for (const auto& w : p.weights) p.biases.emplace_back(1, w.cols());
  return p;
}

ProjectionParams init_projection(std::size_t width, Rng& rng) {
  ProjectionParams p;
  p.w0 = glorot(width, width, rng);
  p.w1 = glorot(width, width, rng);
  return p;
}

ModelParams init_model(EncoderKind kind, std::size_t feature_dim, std::uint64_t seed, bool use_bias,
                       EncoderShape shape) {
  Rng rng = make_stream(seed, "init");
  ModelParams m;
  m.encoder = init_encoder(kind, feature_dim, rng, use_bias, shape);
  m.projection = init_projection(shape.out_dim, rng);
  return m;
}

Matrix transform_features(const EncoderParams& params, const Matrix& x) {
  if (x.cols() != params.weights.front().rows())
    throw std::invalid_argument("encoder: feature width does not match the first weight matrix");
  Matrix p = matmul(x, params.weights.front());
  if (params.kind == EncoderKind::Gnae && has_bias(params)) add_row_vector(p, params.biases.front());
  return p;
}

EncoderTape propagate(const EncoderParams& params, const Matrix& transformed, const NormalizedAdjacency& adj) {
  if (adj.matrix.n != transformed.rows()) throw std::invalid_argument("encoder: adjacency size does not match features");
  EncoderTape t;
  switch (params.kind) {
    case EncoderKind::Gcn: {
      t.hidden_pre = spmm(adj, transformed);
      if (has_bias(params)) add_row_vector(t.hidden_pre, params.biases[0]);
      t.hidden = t.hidden_pre;
      relu_inplace(t.hidden);
      t.z = spmm(adj, matmul(t.hidden, params.weights[1]));
      if (has_bias(params)) add_row_vector(t.z, params.biases[1]);
      break;
    }
    case EncoderKind::Lin: {
      t.z = spmm(adj, transformed);
      if (has_bias(params)) add_row_vector(t.z, params.biases[0]);
      break;
    }
    case EncoderKind::Gnae: {
      t.hidden = transformed;
      t.row_norms.resize(transformed.rows());
      for (std::size_t r = 0; r < transformed.rows(); ++r) {
        auto row = t.hidden.row(r);
        double s = 0.0;
        for (double x : row) s += x * x;
        const double nrm = std::sqrt(s);
        t.row_norms[r] = nrm;
        if (nrm < kZeroNorm) {
          std::fill(row.begin(), row.end(), 0.0);
        } else {
          for (double& x : row) x /= nrm;
        }
      }
      t.z = spmm(adj, t.hidden);
      break;
    }
  }
  return t;
}

Matrix propagate_backward(const EncoderParams& params, const EncoderTape& tape, const NormalizedAdjacency& adj,
                          const Matrix& dz, EncoderParams& grads) {
  // Â is symmetric, so the adjoint of spmm(Â, .) is spmm(Â, .).
  switch (params.kind) {
    case EncoderKind::Gcn: {
      if (has_bias(params)) add_inplace(grads.biases[1], column_sums(dz));
      const Matrix ds = spmm(adj, dz);
      add_inplace(grads.weights[1], matmul_tn(tape.hidden, ds));
      Matrix dq = matmul_nt(ds, params.weights[1]);
      auto q = tape.hidden_pre.values();
      auto g = dq.values();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (!(q[i] > 0.0)) g[i] = 0.0;
      if (has_bias(params)) add_inplace(grads.biases[0], column_sums(dq));
      return spmm(adj, dq);
    }
    case EncoderKind::Lin: {
      if (has_bias(params)) add_inplace(grads.biases[0], column_sums(dz));
      return spmm(adj, dz);
    }
    case EncoderKind::Gnae: {
      Matrix dh = spmm(adj, dz);
      for (std::size_t r = 0; r < dh.rows(); ++r) {
        auto g = dh.row(r);
        const double nrm = tape.row_norms[r];
        if (nrm < kZeroNorm) {
          std::fill(g.begin(), g.end(), 0.0);
          continue;
        }
        const auto h = tape.hidden.row(r);
        double proj = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) proj += h[c] * g[c];
        for (std::size_t c = 0; c < g.size(); ++c) g[c] = (g[c] - h[c] * proj) / nrm;
      }
      return dh;
    }
  }
  throw std::logic_error("unreachable");
}

void transform_backward(const EncoderParams& params, const Matrix& x, const Matrix& dtransformed,
                        EncoderParams& grads) {
  add_inplace(grads.weights[0], matmul_tn(x, dtransformed));
  if (params.kind == EncoderKind::Gnae && has_bias(params)) add_inplace(grads.biases[0], column_sums(dtransformed));
}

Matrix encoder_forward(const EncoderParams& params, const Matrix& x, const NormalizedAdjacency& adj) {
  return propagate(params, transform_features(params, x), adj).z;
}

ProjectionTape projection_forward_tape(const ProjectionParams& params, const Matrix& z) {
  if (z.cols() != params.w0.rows()) throw std::invalid_argument("projection: embedding width mismatch");
  ProjectionTape t;
  t.pre = matmul(z, params.w0);
  Matrix r = t.pre;
  relu_inplace(r);
  t.h = matmul(r, params.w1);
  return t;
}

Matrix projection_forward(const ProjectionParams& params, const Matrix& z) {
  return projection_forward_tape(params, z).h;
}

Matrix projection_backward(const ProjectionParams& params, const Matrix& z, const ProjectionTape& tape,
                           const Matrix& dh, ProjectionParams& grads) {
  Matrix r = tape.pre;
  relu_inplace(r);
  add_inplace(grads.w1, matmul_tn(r, dh));
  Matrix dpre = matmul_nt(dh, params.w1);
  auto q = tape.pre.values();
  auto g = dpre.values();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(q[i] > 0.0)) g[i] = 0.0;
  add_inplace(grads.w0, matmul_tn(z, dpre));
  return matmul_nt(dpre, params.w0);
}

Matrix column_sums(const Matrix& m) {
  Matrix s(1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) s(0, c) += row[c];
  }
  return s;
}

}  // namespace ness
