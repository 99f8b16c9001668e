// AVX2 + FMA variants of the dense kernels. Compiled with -mavx2 -mfma and
// only reached after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>

#include "pitch3d/kernels.hpp"

namespace pitch3d::kernels {

namespace {

// R rows x (4*V) columns of C held in registers across the whole k loop.
template <int R, int V>
inline void gemm_block(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                       std::size_t ldb, double* c, std::size_t ldc) {
  __m256d acc[R][V];
  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) acc[r][v] = _mm256_loadu_pd(c + r * ldc + 4 * v);

  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * ldb;
    __m256d bv[V];
    for (int v = 0; v < V; ++v) bv[v] = _mm256_loadu_pd(bp + 4 * v);
    const double* ap = a + p * a_cs;
    for (int r = 0; r < R; ++r) {
      const __m256d av = _mm256_broadcast_sd(ap + r * a_rs);
      for (int v = 0; v < V; ++v) acc[r][v] = _mm256_fmadd_pd(av, bv[v], acc[r][v]);
    }
  }

  for (int r = 0; r < R; ++r)
    for (int v = 0; v < V; ++v) _mm256_storeu_pd(c + r * ldc + 4 * v, acc[r][v]);
}

// Hand-unrolled 4x8 and 4x4 tiles; GCC spills the array form to the stack.
template <>
inline void gemm_block<4, 2>(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                             std::size_t ldb, double* c, std::size_t ldc) {
  __m256d c00 = _mm256_loadu_pd(c), c01 = _mm256_loadu_pd(c + 4);
  __m256d c10 = _mm256_loadu_pd(c + ldc), c11 = _mm256_loadu_pd(c + ldc + 4);
  __m256d c20 = _mm256_loadu_pd(c + 2 * ldc), c21 = _mm256_loadu_pd(c + 2 * ldc + 4);
  __m256d c30 = _mm256_loadu_pd(c + 3 * ldc), c31 = _mm256_loadu_pd(c + 3 * ldc + 4);
  const double* a1 = a + a_rs;
  const double* a2 = a + 2 * a_rs;
  const double* a3 = a + 3 * a_rs;
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * ldb;
    const std::size_t ap = p * a_cs;
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d av = _mm256_broadcast_sd(a + ap);
    c00 = _mm256_fmadd_pd(av, b0, c00);
    c01 = _mm256_fmadd_pd(av, b1, c01);
    av = _mm256_broadcast_sd(a1 + ap);
    c10 = _mm256_fmadd_pd(av, b0, c10);
    c11 = _mm256_fmadd_pd(av, b1, c11);
    av = _mm256_broadcast_sd(a2 + ap);
    c20 = _mm256_fmadd_pd(av, b0, c20);
    c21 = _mm256_fmadd_pd(av, b1, c21);
    av = _mm256_broadcast_sd(a3 + ap);
    c30 = _mm256_fmadd_pd(av, b0, c30);
    c31 = _mm256_fmadd_pd(av, b1, c31);
  }
  _mm256_storeu_pd(c, c00);
  _mm256_storeu_pd(c + 4, c01);
  _mm256_storeu_pd(c + ldc, c10);
  _mm256_storeu_pd(c + ldc + 4, c11);
  _mm256_storeu_pd(c + 2 * ldc, c20);
  _mm256_storeu_pd(c + 2 * ldc + 4, c21);
  _mm256_storeu_pd(c + 3 * ldc, c30);
  _mm256_storeu_pd(c + 3 * ldc + 4, c31);
}

// 6x8 tile: 12 accumulators, 8 loads per 12 FMAs.
inline void gemm_block_6x8(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                           std::size_t ldb, double* c, std::size_t ldc) {
  __m256d c00 = _mm256_loadu_pd(c), c01 = _mm256_loadu_pd(c + 4);
  __m256d c10 = _mm256_loadu_pd(c + ldc), c11 = _mm256_loadu_pd(c + ldc + 4);
  __m256d c20 = _mm256_loadu_pd(c + 2 * ldc), c21 = _mm256_loadu_pd(c + 2 * ldc + 4);
  __m256d c30 = _mm256_loadu_pd(c + 3 * ldc), c31 = _mm256_loadu_pd(c + 3 * ldc + 4);
  __m256d c40 = _mm256_loadu_pd(c + 4 * ldc), c41 = _mm256_loadu_pd(c + 4 * ldc + 4);
  __m256d c50 = _mm256_loadu_pd(c + 5 * ldc), c51 = _mm256_loadu_pd(c + 5 * ldc + 4);
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * ldb;
    const double* ap = a + p * a_cs;
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d av = _mm256_broadcast_sd(ap);
    c00 = _mm256_fmadd_pd(av, b0, c00);
    c01 = _mm256_fmadd_pd(av, b1, c01);
    av = _mm256_broadcast_sd(ap + a_rs);
    c10 = _mm256_fmadd_pd(av, b0, c10);
    c11 = _mm256_fmadd_pd(av, b1, c11);
    av = _mm256_broadcast_sd(ap + 2 * a_rs);
    c20 = _mm256_fmadd_pd(av, b0, c20);
    c21 = _mm256_fmadd_pd(av, b1, c21);
    av = _mm256_broadcast_sd(ap + 3 * a_rs);
    c30 = _mm256_fmadd_pd(av, b0, c30);
    c31 = _mm256_fmadd_pd(av, b1, c31);
    av = _mm256_broadcast_sd(ap + 4 * a_rs);
    c40 = _mm256_fmadd_pd(av, b0, c40);
    c41 = _mm256_fmadd_pd(av, b1, c41);
    av = _mm256_broadcast_sd(ap + 5 * a_rs);
    c50 = _mm256_fmadd_pd(av, b0, c50);
    c51 = _mm256_fmadd_pd(av, b1, c51);
  }
  _mm256_storeu_pd(c, c00);
  _mm256_storeu_pd(c + 4, c01);
  _mm256_storeu_pd(c + ldc, c10);
  _mm256_storeu_pd(c + ldc + 4, c11);
  _mm256_storeu_pd(c + 2 * ldc, c20);
  _mm256_storeu_pd(c + 2 * ldc + 4, c21);
  _mm256_storeu_pd(c + 3 * ldc, c30);
  _mm256_storeu_pd(c + 3 * ldc + 4, c31);
  _mm256_storeu_pd(c + 4 * ldc, c40);
  _mm256_storeu_pd(c + 4 * ldc + 4, c41);
  _mm256_storeu_pd(c + 5 * ldc, c50);
  _mm256_storeu_pd(c + 5 * ldc + 4, c51);
}

template <>
inline void gemm_block<4, 1>(std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs, const double* b,
                             std::size_t ldb, double* c, std::size_t ldc) {
  __m256d c0 = _mm256_loadu_pd(c);
  __m256d c1 = _mm256_loadu_pd(c + ldc);
  __m256d c2 = _mm256_loadu_pd(c + 2 * ldc);
  __m256d c3 = _mm256_loadu_pd(c + 3 * ldc);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb);
    const double* ap = a + p * a_cs;
    c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap), b0, c0);
    c1 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + a_rs), b0, c1);
    c2 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + 2 * a_rs), b0, c2);
    c3 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + 3 * a_rs), b0, c3);
  }
  _mm256_storeu_pd(c, c0);
  _mm256_storeu_pd(c + ldc, c1);
  _mm256_storeu_pd(c + 2 * ldc, c2);
  _mm256_storeu_pd(c + 3 * ldc, c3);
}

template <int R>
inline void gemm_rows(std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
                      const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) gemm_block<R, 2>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  if (j + 4 <= n) {
    gemm_block<R, 1>(k, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
    j += 4;
  }
  for (; j < n; ++j) {
    for (int r = 0; r < R; ++r) {
      double acc = c[r * ldc + j];
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[r * a_rs + p * a_cs], b[p * ldb + j], acc);
      c[r * ldc + j] = acc;
    }
  }
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  if (n >= 8) {
    const std::size_t n8 = n - n % 8;
    for (; i + 6 <= m; i += 6) {
      for (std::size_t j = 0; j < n8; j += 8) {
        gemm_block_6x8(k, a + i * a_rs, a_rs, a_cs, b + j, ldb, c + i * ldc + j, ldc);
      }
      if (n8 < n) {
        gemm_rows<3>(n - n8, k, a + i * a_rs, a_rs, a_cs, b + n8, ldb, c + i * ldc + n8, ldc);
        gemm_rows<3>(n - n8, k, a + (i + 3) * a_rs, a_rs, a_cs, b + n8, ldb, c + (i + 3) * ldc + n8, ldc);
      }
    }
  }
  for (; i + 4 <= m; i += 4) gemm_rows<4>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  switch (m - i) {
    case 3: gemm_rows<3>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc); break;
    case 2: gemm_rows<2>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc); break;
    case 1: gemm_rows<1>(n, k, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc); break;
    default: break;
  }
}

void transpose(std::size_t rows, std::size_t cols, const double* src, double* dst) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d r0 = _mm256_loadu_pd(src + i * cols + j);
      const __m256d r1 = _mm256_loadu_pd(src + (i + 1) * cols + j);
      const __m256d r2 = _mm256_loadu_pd(src + (i + 2) * cols + j);
      const __m256d r3 = _mm256_loadu_pd(src + (i + 3) * cols + j);
      const __m256d t0 = _mm256_unpacklo_pd(r0, r1);  // r0[0] r1[0] r0[2] r1[2]
      const __m256d t1 = _mm256_unpackhi_pd(r0, r1);  // r0[1] r1[1] r0[3] r1[3]
      const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
      const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
      _mm256_storeu_pd(dst + j * rows + i, _mm256_permute2f128_pd(t0, t2, 0x20));
      _mm256_storeu_pd(dst + (j + 1) * rows + i, _mm256_permute2f128_pd(t1, t3, 0x20));
      _mm256_storeu_pd(dst + (j + 2) * rows + i, _mm256_permute2f128_pd(t0, t2, 0x31));
      _mm256_storeu_pd(dst + (j + 3) * rows + i, _mm256_permute2f128_pd(t1, t3, 0x31));
    }
    for (; j < cols; ++j)
      for (std::size_t r = i; r < i + 4; ++r) dst[j * rows + r] = src[r * cols + j];
  }
  for (; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) dst[j * rows + i] = src[i * cols + j];
}

void col_sum_acc(std::size_t rows, std::size_t cols, const double* a, std::size_t lda, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    __m256d acc = _mm256_loadu_pd(out + j);
    for (std::size_t i = 0; i < rows; ++i) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i * lda + j));
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < cols; ++j) {
    double acc = out[j];
    for (std::size_t i = 0; i < rows; ++i) acc += a[i * lda + j];
    out[j] = acc;
  }
}

void relu(const double* in, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  // max_pd returns the second operand when either input is NaN or both are zero.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(in + i), zero));
  for (; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_mask(const double* pre, double* grad, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), keep));
  }
  for (; i < n; ++i) grad[i] = pre[i] > 0.0 ? grad[i] : 0.0;
}

void adam_step(double* theta, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const double inv_bc1 = 1.0 / c.bias_correction1;
  const double inv_bc2 = 1.0 / c.bias_correction2;
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(one_minus_b1);
  const __m256d omb2 = _mm256_set1_pd(one_minus_b2);
  const __m256d bc1 = _mm256_set1_pd(inv_bc1);
  const __m256d bc2 = _mm256_set1_pd(inv_bc2);
  const __m256d alpha = _mm256_set1_pd(c.alpha);
  const __m256d eps = _mm256_set1_pd(c.epsilon);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(omb1, gi));
    const __m256d vi =
        _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)), _mm256_mul_pd(omb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_mul_pd(mi, bc1);
    const __m256d v_hat = _mm256_mul_pd(vi, bc2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(alpha, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    const double mi = c.beta1 * m[i] + one_minus_b1 * gi;
    const double vi = c.beta2 * v[i] + one_minus_b2 * (gi * gi);
    m[i] = mi;
    v[i] = vi;
    const double m_hat = mi * inv_bc1;
    const double v_hat = vi * inv_bc2;
    theta[i] -= c.alpha * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", gemm_acc, transpose, col_sum_acc, relu, relu_mask, adam_step};
  return table;
}

}  // namespace pitch3d::kernels
