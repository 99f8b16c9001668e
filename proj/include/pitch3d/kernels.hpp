#pragma once

#include <cstddef>

namespace pitch3d::kernels {

/// Bias-corrected Adam coefficients for one step.
struct AdamCoeffs {
  double alpha;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

/// Dense double-precision kernels used by the network. Every implementation
/// must produce bit-identical results to the scalar reference: accumulation
/// runs in ascending k with one fused multiply-add per term, and elementwise
/// kernels use the same operation sequence.
struct KernelTable {
  const char* name;

  /// C[i][j] += sum_p A(i, p) * B[p][j] for i < m, j < n, p < k, where
  /// A(i, p) = a[i * a_row_stride + p * a_col_stride], B is row-major with
  /// leading dimension ldb and C with ldc.
  void (*gemm_acc)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t a_row_stride,
                   std::size_t a_col_stride, const double* b, std::size_t ldb, double* c, std::size_t ldc);

  /// dst (cols x rows, ld rows) = transpose of src (rows x cols, ld cols).
  void (*transpose)(std::size_t rows, std::size_t cols, const double* src, double* dst);

  /// out[j] += sum_i a[i][j] over rows i ascending.
  void (*col_sum_acc)(std::size_t rows, std::size_t cols, const double* a, std::size_t lda, double* out);

  /// out = max(in, 0) with NaN mapped to +0.
  void (*relu)(const double* in, double* out, std::size_t n);

  /// grad[i] = pre[i] > 0 ? grad[i] : 0.
  void (*relu_mask)(const double* pre, double* grad, std::size_t n);

  /// In-place Adam update of theta, m, v from gradient g.
  void (*adam_step)(double* theta, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Selected once at first use: PITCH3D_KERNELS=scalar|avx2|auto (default auto).
const KernelTable& active_kernels();

/// Flushes subnormal results and operands to zero for the lifetime of the
/// object (x86 MXCSR FTZ/DAZ); no-op elsewhere. Restores the previous mode.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals();
  ~ScopedFlushDenormals();
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

}  // namespace pitch3d::kernels
