#include <cmath>

#include "pitch3d/kernels.hpp"

namespace pitch3d::kernels {

namespace {

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_rs, std::size_t a_cs,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      double acc = crow[j];
      for (std::size_t p = 0; p < k; ++p) acc = std::fma(a[i * a_rs + p * a_cs], b[p * ldb + j], acc);
      crow[j] = acc;
    }
  }
}

void transpose(std::size_t rows, std::size_t cols, const double* src, double* dst) {
  constexpr std::size_t kTile = 8;
  for (std::size_t i0 = 0; i0 < rows; i0 += kTile) {
    const std::size_t i1 = i0 + kTile < rows ? i0 + kTile : rows;
    for (std::size_t j0 = 0; j0 < cols; j0 += kTile) {
      const std::size_t j1 = j0 + kTile < cols ? j0 + kTile : cols;
      for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = j0; j < j1; ++j) dst[j * rows + i] = src[i * cols + j];
    }
  }
}

void col_sum_acc(std::size_t rows, std::size_t cols, const double* a, std::size_t lda, double* out) {
  for (std::size_t j = 0; j < cols; ++j) {
    double acc = out[j];
    for (std::size_t i = 0; i < rows; ++i) acc += a[i * lda + j];
    out[j] = acc;
  }
}

void relu(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_mask(const double* pre, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad[i] = pre[i] > 0.0 ? grad[i] : 0.0;
}

void adam_step(double* theta, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const double inv_bc1 = 1.0 / c.bias_correction1;
  const double inv_bc2 = 1.0 / c.bias_correction2;
  for (std::size_t i = 0; i < n; ++i) {
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

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", gemm_acc, transpose, col_sum_acc, relu, relu_mask, adam_step};
  return table;
}

}  // namespace pitch3d::kernels
