// SPDX-License-Identifier: Apache-2.0
#include "ness/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ness/sparse.hpp"

namespace ness {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

bool same_shape(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

void add_inplace(Matrix& a, const Matrix& b) { axpy_inplace(a, 1.0, b); }

void axpy_inplace(Matrix& a, double s, const Matrix& b) {
  if (!same_shape(a, b)) throw std::invalid_argument("axpy_inplace: shape mismatch");
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += s * bv[i];
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!same_shape(a, b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

Matrix CsrMatrix::to_dense() const {
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) m(r, col_idx[p]) = values[p];
  return m;
}

}  // namespace ness
