#include "kernel_variants.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace approxifer::simd::detail {
namespace {

// Separate multiply and add (no FMA) so each lane rounds exactly like the
// scalar reference.
__attribute__((target("avx2"))) void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    __m256d y0 = _mm256_loadu_pd(y + k);
    __m256d y1 = _mm256_loadu_pd(y + k + 4);
    y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + k)));
    y1 = _mm256_add_pd(y1, _mm256_mul_pd(va, _mm256_loadu_pd(x + k + 4)));
    _mm256_storeu_pd(y + k, y0);
    _mm256_storeu_pd(y + k + 4, y1);
  }
  for (; k + 4 <= n; k += 4) {
    __m256d y0 = _mm256_loadu_pd(y + k);
    y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + k)));
    _mm256_storeu_pd(y + k, y0);
  }
  for (; k < n; ++k) {
    y[k] = y[k] + a * x[k];
  }
}

__attribute__((target("avx2"))) void scale_avx2(double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_mul_pd(_mm256_loadu_pd(y + k), va));
  }
  for (; k < n; ++k) {
    y[k] = y[k] * a;
  }
}

__attribute__((target("avx2"))) void relu_avx2(double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    // maxpd returns the second operand when either is NaN.
    _mm256_storeu_pd(y + k, _mm256_max_pd(_mm256_loadu_pd(y + k), zero));
  }
  for (; k < n; ++k) {
    y[k] = y[k] > 0.0 ? y[k] : 0.0;
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::avx2, axpy_avx2, scale_avx2, relu_avx2};
  return &table;
}

}  // namespace approxifer::simd::detail

#else

namespace approxifer::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace approxifer::simd::detail

#endif
