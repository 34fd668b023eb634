// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense and sparse-dense products used by the encoders.
//
// The functions in namespace ness are row-parallel (OpenMP when enabled).
// Every output row is accumulated by a single thread in a fixed order, so the
// results are bit-identical to the serial versions in ness::reference and do
// not depend on the thread count.

#include "ness/matrix.hpp"
#include "ness/sparse.hpp"

namespace ness {

/// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// C = A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// C = A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// C = S * D, accumulating each row in ascending column index order.
Matrix spmm(const CsrMatrix& s, const Matrix& d);

/// Threads used by the parallel kernels (1 when built without OpenMP).
int kernel_threads();
void set_kernel_threads(int n);

namespace reference {

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix spmm(const CsrMatrix& s, const Matrix& d);

}  // namespace reference
}  // namespace ness
