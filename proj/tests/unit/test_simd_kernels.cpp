#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/predictor.hpp"
#include "approxifer/simd/kernels.hpp"
#include "fixtures.hpp"

using namespace approxifer;
using approxifer::simd::Isa;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

// Runs under APPROXIFER_SIMD=<isa> from ctest; an ISA the host lacks is skipped.
bool forced_isa_unavailable() {
  const char* env = std::getenv("APPROXIFER_SIMD");
  if (env == nullptr || *env == '\0') return false;
  return !simd::isa_supported(simd::parse_isa(env));
}

#define SKIP_IF_FORCED_ISA_UNAVAILABLE() \
  if (forced_isa_unavailable()) GTEST_SKIP() << "forced ISA not supported on this host"

}  // namespace

TEST(SimdDispatch, ScalarAlwaysSupported) {
  EXPECT_TRUE(simd::isa_supported(Isa::scalar));
  EXPECT_EQ(simd::kernels_for(Isa::scalar).isa, Isa::scalar);
  EXPECT_THROW(simd::parse_isa("sse9"), std::invalid_argument);
  EXPECT_EQ(simd::parse_isa(simd::isa_name(Isa::avx2)), Isa::avx2);
}

TEST(SimdDispatch, EnvironmentSelectsIsa) {
  SKIP_IF_FORCED_ISA_UNAVAILABLE();
  const char* env = std::getenv("APPROXIFER_SIMD");
  if (env == nullptr || *env == '\0') GTEST_SKIP() << "no override set";
  EXPECT_EQ(simd::active_isa(), simd::parse_isa(env));
}

TEST(SimdKernels, AxpyScaleReluBitIdenticalAcrossIsas) {
  SKIP_IF_FORCED_ISA_UNAVAILABLE();
  std::mt19937_64 rng(11);
  const auto& ref = simd::kernels_for(Isa::scalar);
  for (Isa isa : simd::supported_isas()) {
    const auto& k = simd::kernels_for(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 127u, 1000u}) {
      const auto x = random_vector(n, rng);
      const auto y0 = random_vector(n, rng);
      const double a = std::normal_distribution<double>(0.0, 2.0)(rng);

      auto y_ref = y0, y_isa = y0;
      ref.axpy(a, x.data(), y_ref.data(), n);
      k.axpy(a, x.data(), y_isa.data(), n);
      EXPECT_TRUE(bitwise_equal(y_ref, y_isa)) << simd::isa_name(isa) << " axpy n=" << n;

      y_ref = y0;
      y_isa = y0;
      ref.scale(a, y_ref.data(), n);
      k.scale(a, y_isa.data(), n);
      EXPECT_TRUE(bitwise_equal(y_ref, y_isa)) << simd::isa_name(isa) << " scale n=" << n;

      y_ref = y0;
      y_isa = y0;
      ref.relu(y_ref.data(), n);
      k.relu(y_isa.data(), n);
      EXPECT_TRUE(bitwise_equal(y_ref, y_isa)) << simd::isa_name(isa) << " relu n=" << n;
    }
  }
}

TEST(SimdKernels, ReluSpecialValues) {
  SKIP_IF_FORCED_ISA_UNAVAILABLE();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> input{-0.0, 0.0, nan, -inf, inf, -1e-310, 1e-310, -2.0, 2.0};
  auto expected = input;
  simd::kernels_for(Isa::scalar).relu(expected.data(), expected.size());
  EXPECT_EQ(std::bit_cast<std::uint64_t>(expected[0]), std::bit_cast<std::uint64_t>(0.0));
  EXPECT_EQ(expected[2], 0.0);
  EXPECT_EQ(expected[4], inf);
  EXPECT_EQ(expected[6], 1e-310);
  for (Isa isa : simd::supported_isas()) {
    auto got = input;
    simd::kernels_for(isa).relu(got.data(), got.size());
    EXPECT_TRUE(bitwise_equal(expected, got)) << simd::isa_name(isa);
  }
}

TEST(SimdKernels, WeightedRowSumMatchesScalarLoop) {
  SKIP_IF_FORCED_ISA_UNAVAILABLE();
  std::mt19937_64 rng(5);
  const std::size_t rows = 6, cols = 19;
  const auto w = random_vector(rows, rng);
  const auto data = random_vector(rows * cols, rng);
  std::vector<double> expected(cols, 0.0);
  for (std::size_t j = 0; j < rows; ++j)
    for (std::size_t c = 0; c < cols; ++c) {
      const double prod = w[j] * data[j * cols + c];
      expected[c] = expected[c] + prod;
    }
  std::vector<double> got(cols, 1.0);
  simd::weighted_row_sum(w, data, cols, got);
  EXPECT_TRUE(bitwise_equal(expected, got));
}

TEST(SimdKernels, PipelineOutputsIdenticalUnderEveryIsa) {
  SKIP_IF_FORCED_ISA_UNAVAILABLE();
  const Isa original = simd::active_isa();
  std::mt19937_64 rng(21);
  const auto predictor = support::blobs_predictor();
  const auto batch = support::random_batch(8, predictor->input_dim(), rng, 4.0);
  const BerrutCodec codec(make_config(8, 2, 0));

  auto run = [&] {
    const auto coded = codec.encode(batch);
    std::map<std::size_t, PredictionVector> returned;
    for (std::size_t i = 0; i < coded.rows(); i += 1) {
      if (i == 3 || i == 6) continue;
      returned.emplace(i, predictor->predict(coded.row(i)));
    }
    std::vector<double> flat;
    for (const auto& y : codec.decode(returned))
      flat.insert(flat.end(), y.begin(), y.end());
    return flat;
  };

  simd::set_active_isa(Isa::scalar);
  const auto reference = run();
  for (Isa isa : simd::supported_isas()) {
    simd::set_active_isa(isa);
    EXPECT_TRUE(bitwise_equal(reference, run())) << simd::isa_name(isa);
  }
  simd::set_active_isa(original);
}
