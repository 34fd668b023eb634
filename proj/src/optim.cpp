// SPDX-License-Identifier: Apache-2.0
#include "ness/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "ness/error.hpp"

namespace ness {

void AdamW::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("AdamW: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!same_shape(*params[i], *grads[i])) throw std::invalid_argument("AdamW: gradient shape mismatch");
    if (!grads[i]->all_finite()) throw NumericalError("AdamW: non-finite gradient in tensor " + std::to_string(i));
  }
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  } else if (m_.size() != params.size()) {
    throw std::invalid_argument("AdamW: parameter set changed between steps");
  }

  ++t_;
  const auto& c = config_;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t_));
  const double bc2_sqrt = std::sqrt(1.0 - std::pow(c.beta2, static_cast<double>(t_)));
  const double step_size = c.lr / bc1;
  const double decay = 1.0 - c.lr * c.weight_decay;

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    auto g = grads[i]->values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] *= decay;
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double denom = std::sqrt(v[j]) / bc2_sqrt + c.eps;
      p[j] -= step_size * m[j] / denom;
    }
  }
}

}  // namespace ness
