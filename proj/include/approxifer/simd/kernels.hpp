#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace approxifer::simd {

// Instruction-set families that have a kernel implementation. `scalar` is the
// reference; every other variant must produce bit-identical results to it.
enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);

// True when the variant is compiled in and the running CPU supports it.
bool isa_supported(Isa isa);

// All supported variants, scalar first.
std::vector<Isa> supported_isas();

struct KernelTable {
  Isa isa;
  // y[k] += a * x[k]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[k] *= a
  void (*scale)(double a, double* y, std::size_t n);
  // y[k] = max(y[k], 0)
  void (*relu)(double* y, std::size_t n);
};

// Kernel table of a specific variant. Throws std::invalid_argument when the
// variant is not supported on this machine.
const KernelTable& kernels_for(Isa isa);

// The active table. Chosen once at first use: APPROXIFER_SIMD in the
// environment wins if it names a supported variant, otherwise the widest
// supported variant.
const KernelTable& kernels();
Isa active_isa();

// Overrides the active variant for the whole process. Used by equivalence
// tests and benchmarks; not thread-safe against concurrent kernel calls.
void set_active_isa(Isa isa);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  kernels().axpy(a, x.data(), y.data(), y.size() < x.size() ? y.size() : x.size());
}

inline void scale(double a, std::span<double> y) { kernels().scale(a, y.data(), y.size()); }

inline void relu(std::span<double> y) { kernels().relu(y.data(), y.size()); }

// out = sum_j weights[j] * rows[j], accumulated in ascending j so the result is
// independent of the kernel variant.
void weighted_row_sum(std::span<const double> weights, std::span<const double> rows, std::size_t cols,
                      std::span<double> out);

}  // namespace approxifer::simd
