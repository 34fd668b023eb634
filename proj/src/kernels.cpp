// SPDX-License-Identifier: Apache-2.0
#include "ness/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ness {
namespace {

void check_matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
}
void check_matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: row count mismatch");
}
void check_matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: column count mismatch");
}
void check_spmm(const CsrMatrix& s, const Matrix& d) {
  if (s.n != d.rows()) throw std::invalid_argument("spmm: dimension mismatch");
}

// Row kernels shared by the serial and parallel drivers so both produce the
// same bits.

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t m = b.cols();
  double* out = c.data() + i * m;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double aik = a(i, k);
    if (aik == 0.0) continue;
    const double* brow = b.data() + k * m;
    for (std::size_t j = 0; j < m; ++j) out[j] += aik * brow[j];
  }
}

// Row i of A^T B: sum over n of A(n, i) * B(n, :), n ascending.
inline void matmul_tn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t m = b.cols();
  double* out = c.data() + i * m;
  for (std::size_t n = 0; n < a.rows(); ++n) {
    const double ani = a(n, i);
    if (ani == 0.0) continue;
    const double* brow = b.data() + n * m;
    for (std::size_t j = 0; j < m; ++j) out[j] += ani * brow[j];
  }
}

inline void matmul_nt_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const double* arow = a.data() + i * a.cols();
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const double* brow = b.data() + j * b.cols();
    double acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
    c(i, j) = acc;
  }
}

inline void spmm_row(const CsrMatrix& s, const Matrix& d, Matrix& c, std::size_t i) {
  const std::size_t m = d.cols();
  double* out = c.data() + i * m;
  for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
    const double v = s.values[p];
    const double* drow = d.data() + static_cast<std::size_t>(s.col_idx[p]) * m;
    for (std::size_t j = 0; j < m; ++j) out[j] += v * drow[j];
  }
}

template <typename RowFn>
void parallel_rows(std::size_t rows, RowFn&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul(a, b);
  Matrix c(a.rows(), b.cols());
  parallel_rows(a.rows(), [&](std::size_t i) { matmul_row(a, b, c, i); });
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_matmul_tn(a, b);
  Matrix c(a.cols(), b.cols());
  parallel_rows(a.cols(), [&](std::size_t i) { matmul_tn_row(a, b, c, i); });
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_matmul_nt(a, b);
  Matrix c(a.rows(), b.rows());
  parallel_rows(a.rows(), [&](std::size_t i) { matmul_nt_row(a, b, c, i); });
  return c;
}

Matrix spmm(const CsrMatrix& s, const Matrix& d) {
  check_spmm(s, d);
  Matrix c(s.n, d.cols());
  parallel_rows(s.n, [&](std::size_t i) { spmm_row(s, d, c, i); });
  return c;
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_kernel_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace reference {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_matmul(a, b);
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_matmul_tn(a, b);
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) matmul_tn_row(a, b, c, i);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_matmul_nt(a, b);
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_nt_row(a, b, c, i);
  return c;
}

Matrix spmm(const CsrMatrix& s, const Matrix& d) {
  check_spmm(s, d);
  Matrix c(s.n, d.cols());
  for (std::size_t i = 0; i < s.n; ++i) spmm_row(s, d, c, i);
  return c;
}

}  // namespace reference
}  // namespace ness
