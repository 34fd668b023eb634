// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ness/graph.hpp"
#include "ness/matrix.hpp"
#include "ness/rng.hpp"

namespace ness {

enum class EncoderKind { Gcn, Lin, Gnae };

std::string_view to_string(EncoderKind kind);
/// Accepts "gcn", "lin", "gnae" (case-insensitive).
EncoderKind parse_encoder_kind(std::string_view text);

struct EncoderShape {
  std::size_t hidden_dim = 64;  ///< GCN first layer width
  std::size_t out_dim = 32;
};

/// Encoder weights.
///   GCN:  z = Â relu(Â X W0 + b0) W1 + b1
///   LIN:  z = Â X W0 + b0
///   GNAE: z = Â rownorm(X W0 + b0)
/// Biases are present only when enabled at initialization.
struct EncoderParams {
  EncoderKind kind = EncoderKind::Gnae;
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;  ///< 1 x width each, or empty

  std::size_t out_dim() const { return weights.back().cols(); }
  bool operator==(const EncoderParams&) const = default;
};

/// Projection head h = relu(z P0) P1, bias-free.
struct ProjectionParams {
  Matrix w0;
  Matrix w1;

  bool operator==(const ProjectionParams&) const = default;
};

/// Everything the optimizer updates.
struct ModelParams {
  EncoderParams encoder;
  ProjectionParams projection;

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::vector<std::string> tensor_names() const;
  /// Same shapes, all zeros.
  ModelParams zeros_like() const;
  bool operator==(const ModelParams&) const = default;
};

/// Glorot-uniform weights (range +-sqrt(6 / (fan_in + fan_out))), zero biases.
EncoderParams init_encoder(EncoderKind kind, std::size_t feature_dim, Rng& rng, bool use_bias = false,
                           EncoderShape shape = {});
ProjectionParams init_projection(std::size_t width, Rng& rng);
ModelParams init_model(EncoderKind kind, std::size_t feature_dim, std::uint64_t seed, bool use_bias = false,
                       EncoderShape shape = {});

/// Feature transform X W0 (+ b0 for GNAE). Independent of the adjacency, so it
/// is computed once and shared by every subgraph forward of an epoch.
Matrix transform_features(const EncoderParams& params, const Matrix& x);

/// Intermediate values of one propagation, kept for the backward pass.
struct EncoderTape {
  Matrix hidden_pre;   ///< GCN: Â P + b0
  Matrix hidden;       ///< GCN: relu(hidden_pre); GNAE: rownorm(P)
  std::vector<double> row_norms;  ///< GNAE: ||P_i||
  Matrix z;
};

/// Adjacency-dependent part of the encoder applied to transformed features.
EncoderTape propagate(const EncoderParams& params, const Matrix& transformed, const NormalizedAdjacency& adj);

/// Backward through propagate. Accumulates gradients of the propagation
/// parameters into `grads` and returns d loss / d transformed.
Matrix propagate_backward(const EncoderParams& params, const EncoderTape& tape, const NormalizedAdjacency& adj,
                          const Matrix& dz, EncoderParams& grads);

/// Backward through transform_features given the summed d loss / d transformed.
void transform_backward(const EncoderParams& params, const Matrix& x, const Matrix& dtransformed,
                        EncoderParams& grads);

/// z = E(X, Â).
Matrix encoder_forward(const EncoderParams& params, const Matrix& x, const NormalizedAdjacency& adj);

struct ProjectionTape {
  Matrix pre;  ///< z P0
  Matrix h;
};

ProjectionTape projection_forward_tape(const ProjectionParams& params, const Matrix& z);
Matrix projection_forward(const ProjectionParams& params, const Matrix& z);
/// Accumulates dP0, dP1 into `grads` and returns d loss / d z.
Matrix projection_backward(const ProjectionParams& params, const Matrix& z, const ProjectionTape& tape,
                           const Matrix& dh, ProjectionParams& grads);

/// Column sums as a 1 x cols matrix.
Matrix column_sums(const Matrix& m);

}  // namespace ness
