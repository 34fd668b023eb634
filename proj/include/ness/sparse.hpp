// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ness/matrix.hpp"

namespace ness {

/// Square compressed-sparse-row matrix with sorted column indices per row.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
  /// Value at (r, c), 0 if not stored. O(log row length).
  double at(std::size_t r, std::size_t c) const;
  Matrix to_dense() const;

  bool operator==(const CsrMatrix&) const = default;
};

}  // namespace ness
