#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "pitch3d/kernels.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace pitch3d::kernels {

#if defined(PITCH3D_WITH_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(PITCH3D_WITH_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("PITCH3D_KERNELS");
  const std::string_view choice = env ? env : "auto";
  if (choice == "scalar") return scalar_kernels();
  if (choice == "avx2") {
    if (const KernelTable* t = avx2_kernels()) return *t;
    throw std::runtime_error("PITCH3D_KERNELS=avx2 requested but AVX2+FMA is unavailable");
  }
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

#if defined(__SSE2__)
ScopedFlushDenormals::ScopedFlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
ScopedFlushDenormals::~ScopedFlushDenormals() { _mm_setcsr(saved_); }
#else
ScopedFlushDenormals::ScopedFlushDenormals() = default;
ScopedFlushDenormals::~ScopedFlushDenormals() = default;
#endif

}  // namespace pitch3d::kernels
