// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ness/matrix.hpp"

namespace ness {

struct AdamWConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;
  double weight_decay = 0.0;
};

/// Adam with decoupled weight decay, bias-corrected moments:
///   p <- p * (1 - lr * wd)
///   m <- b1 m + (1 - b1) g;  v <- b2 v + (1 - b2) g^2
///   p <- p - (lr / (1 - b1^t)) * m / (sqrt(v) / sqrt(1 - b2^t) + eps)
class AdamW {
 public:
  explicit AdamW(AdamWConfig config = {}) : config_(config) {}

  /// Throws NumericalError on a non-finite gradient; parameters are left
  /// untouched in that case.
  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

  std::size_t steps() const { return t_; }
  const AdamWConfig& config() const { return config_; }

 private:
  AdamWConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::size_t t_ = 0;
};

}  // namespace ness
