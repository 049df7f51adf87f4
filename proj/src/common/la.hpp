#pragma once

#include <cstddef>

namespace aep::la {

// Row-major GEMM: C = alpha * op(A) * op(B) + beta * C.
// op(A) is m x k, op(B) is k x n, C is m x n. Backed by a single-threaded
// BLAS kernel so results are bit-reproducible run to run.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta,
          double* c, int ldc);

// Convenience: C[m x n] = A[m x k] * B[k x n], all tightly packed row-major.
inline void matmul(int m, int k, int n, const double* a, const double* b, double* c) {
  gemm(false, false, m, n, k, 1.0, a, k, b, n, 0.0, c, n);
}

}  // namespace aep::la
