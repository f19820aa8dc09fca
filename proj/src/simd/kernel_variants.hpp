#pragma once

#include "approxifer/simd/kernels.hpp"

namespace approxifer::simd::detail {

const KernelTable& scalar_table();
// Null when the variant was not compiled for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace approxifer::simd::detail
