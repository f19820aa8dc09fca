#include "kernel_variants.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace approxifer::simd::detail {
namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    // vmulq + vaddq rather than vfmaq: must round like the scalar loop.
    float64x2_t prod = vmulq_f64(va, vld1q_f64(x + k));
    vst1q_f64(y + k, vaddq_f64(vld1q_f64(y + k), prod));
  }
  for (; k < n; ++k) {
    y[k] = y[k] + a * x[k];
  }
}

void scale_neon(double a, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    vst1q_f64(y + k, vmulq_f64(vld1q_f64(y + k), va));
  }
  for (; k < n; ++k) {
    y[k] = y[k] * a;
  }
}

void relu_neon(double* y, std::size_t n) {
  std::size_t k = 0;
  const float64x2_t zero = vdupq_n_f64(0.0);
  for (; k + 2 <= n; k += 2) {
    float64x2_t v = vld1q_f64(y + k);
    uint64x2_t positive = vcgtq_f64(v, zero);
    vst1q_f64(y + k, vbslq_f64(positive, v, zero));
  }
  for (; k < n; ++k) {
    y[k] = y[k] > 0.0 ? y[k] : 0.0;
  }
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{Isa::neon, axpy_neon, scale_neon, relu_neon};
  return &table;
}

}  // namespace approxifer::simd::detail

#else

namespace approxifer::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace approxifer::simd::detail

#endif
