#include "kernel_variants.hpp"

namespace approxifer::simd::detail {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = y[k] + a * x[k];
  }
}

void scale_scalar(double a, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = y[k] * a;
  }
}

void relu_scalar(double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    // Matches maxpd semantics: NaN in y propagates as the second operand (0).
    y[k] = y[k] > 0.0 ? y[k] : 0.0;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, axpy_scalar, scale_scalar, relu_scalar};
  return table;
}

}  // namespace approxifer::simd::detail
