#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "lip4/conv/conv_spectrum.hpp"
#include "lip4/conv/lipk.hpp"
#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"
#include "support/oracles.hpp"

namespace lip4 {
namespace {

ConvKernel make_kernel(RealTensor4 filter, std::size_t n, Padding padding = Padding::circular) {
  return {std::move(filter), n, padding, 1};
}

ConvKernel seeded(std::size_t c_out, std::size_t c_in, std::size_t k, std::size_t n,
                  std::uint64_t seed, Padding padding = Padding::circular) {
  return make_kernel(gaussian_filter(c_out, c_in, k, seed), n, padding);
}

ConvKernel delta_identity(std::size_t channels, std::size_t n, Padding padding) {
  RealTensor4 f({channels, channels, 1, 1});
  for (std::size_t c = 0; c < channels; ++c) f(c, c, 0, 0) = 1.0;
  return make_kernel(std::move(f), n, padding);
}

// 1x1 convolution whose channel-mixing matrix is m.
ConvKernel pointwise(const ComplexMatrix& m, std::size_t n, Padding padding) {
  RealTensor4 f({m.rows(), m.cols(), 1, 1});
  for (std::size_t o = 0; o < m.rows(); ++o)
    for (std::size_t i = 0; i < m.cols(); ++i) f(o, i, 0, 0) = m(o, i).real();
  return make_kernel(std::move(f), n, padding);
}

// ---------------------------------------------------------------- block extraction

TEST(ExtractBlocks, ScalarKernel) {
  RealTensor4 f({1, 1, 1, 1}, {2.5});
  const auto spec = extract_blocks(make_kernel(f, 4));
  ASSERT_EQ(spec.blocks.size(), 16U);
  for (const auto& b : spec.blocks) {
    ASSERT_EQ(b.rows(), 1U);
    EXPECT_EQ(b(0, 0), Complex(2.5));
  }
}

TEST(ExtractBlocks, DeltaIdentityGivesIdentityBlocks) {
  const auto spec = extract_blocks(delta_identity(2, 4, Padding::circular));
  for (const auto& b : spec.blocks) EXPECT_LE(frobenius_norm(b - ComplexMatrix::identity(2)), 1e-15);
}

TEST(ExtractBlocks, MatchesDirectDftSums) {
  const auto kernel = seeded(2, 3, 3, 6, 1);
  const auto spec = extract_blocks(kernel);
  const std::size_t n = 6;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 3; ++i) {
          Complex s{};
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
              s += kernel.filter(o, i, a, b) *
                   std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(u * a + v * b) / 6.0);
          EXPECT_LE(std::abs(spec.block(u, v)(o, i) - s), 1e-12);
        }
}

TEST(ExtractBlocks, Errors) {
  EXPECT_THROW(extract_blocks(seeded(1, 1, 5, 4, 0)), InvalidArgument);
  EXPECT_THROW(extract_blocks(seeded(1, 1, 3, 4, 0, Padding::zero)), InvalidArgument);
  auto strided = seeded(1, 1, 3, 4, 0);
  strided.stride = 2;
  EXPECT_THROW(extract_blocks(strided), InvalidArgument);
}

// ---------------------------------------------------------------- operator and oracle

TEST(ConvOperator, MaterializedMatchesDefinition) {
  for (auto padding : {Padding::circular, Padding::zero})
    for (std::size_t k : {1U, 2U, 3U}) {
      const auto kernel = seeded(2, 3, k, 4, 10 + k, padding);
      const auto w = materialize_conv_operator(kernel);
      EXPECT_EQ(frobenius_norm(w - oracle::conv_operator_by_definition(kernel)), 0.0);
    }
}

TEST(ConvOperator, AdjointMatchesConjugateTranspose) {
  for (auto padding : {Padding::circular, Padding::zero})
    for (std::size_t k : {2U, 3U, 4U}) {
      const auto kernel = seeded(3, 2, k, 5, 20 + k, padding);
      const auto wt = conj_transpose(materialize_conv_operator(kernel));
      Rng rng(k);
      std::normal_distribution<double> normal;
      std::vector<double> y(3 * 25);
      for (auto& x : y) x = normal(rng);
      const auto fast = conv_apply_adjoint(kernel, y);
      const std::vector<Complex> yc(y.begin(), y.end());
      const auto slow = lip4::apply(wt, yc);
      for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast[i], slow[i].real(), 1e-12);
    }
}

TEST(Materialize, ScalarKernelIsScaledIdentity) {
  RealTensor4 f({1, 1, 1, 1}, {-1.5});
  const auto w = materialize_conv_operator(make_kernel(f, 2));
  EXPECT_EQ(frobenius_norm(w - ComplexMatrix::identity(4) * -1.5), 0.0);
}

TEST(Materialize, FirstColumnIsVecK) {
  const auto kernel = seeded(1, 1, 3, 3, 4);
  const auto w = materialize_conv_operator(kernel);
  ASSERT_EQ(w.rows(), 9U);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(w(a * 3 + b, 0).real(), kernel.filter(0, 0, a, b));
}

TEST(Materialize, AgreesWithExactSpectrumAndRespectsGuard) {
  const auto kernel = seeded(2, 2, 3, 4, 5);
  EXPECT_LE(oracle::relative_error(spectral_norm_exact(materialize_conv_operator(kernel)),
                                   exact_conv_spectrum(kernel).value),
            1e-10);
  EXPECT_THROW(materialize_conv_operator(seeded(5, 1, 3, 32, 0)), InvalidArgument);
  EXPECT_FALSE(can_materialize(seeded(5, 1, 3, 32, 0)));
}

// ---------------------------------------------------------------- gram_conv / exact

TEST(GramConv, PointwiseEqualsDenseGram) {
  const auto m = gaussian_matrix(3, 2, 8);
  for (int n_iter : {1, 3, 7})
    EXPECT_DOUBLE_EQ(gram_conv(pointwise(m, 5, Padding::circular), n_iter).value,
                     gram_rescaled(m, n_iter).value);
}

TEST(GramConv, AllOnesKernelIsDcGain) {
  RealTensor4 ones({1, 1, 3, 3}, std::vector<double>(9, 1.0));
  const auto r = gram_conv(make_kernel(ones, 8), 6);
  EXPECT_NEAR(r.value, 9.0, 1e-10);
  ASSERT_TRUE(r.argmax_block.has_value());
  EXPECT_EQ(*r.argmax_block, std::make_pair(std::size_t{0}, std::size_t{0}));
}

TEST(GramConv, MatchesMaterializedCircularOperator) {
  const auto kernel = seeded(2, 3, 3, 6, 9);
  const double truth = spectral_norm_exact(oracle::conv_operator_by_definition(kernel));
  EXPECT_LE(oracle::relative_error(gram_conv(kernel, 12).value, truth), 1e-8);
}

TEST(GramConv, TraceUpperBoundsAndConverges) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t c_out = 1 + seed % 4;
    const std::size_t c_in = 1 + (seed / 2) % 4;
    const std::size_t k = 1 + seed % 5;
    const std::size_t n = std::max<std::size_t>(k, 5 + 3 * (seed % 4));
    const auto kernel = seeded(c_out, c_in, k, n, 100 + seed);
    const double exact = exact_conv_spectrum(kernel).value;
    const auto r = gram_conv(kernel, 12);
    for (double v : r.trace) EXPECT_GE(v, exact * (1.0 - 1e-9));
    EXPECT_LE(oracle::relative_error(r.value, exact), 1e-8) << "seed " << seed;
  }
}

TEST(ExactConvSpectrum, ClosedForms) {
  for (std::size_t n : {3U, 4U, 7U}) EXPECT_DOUBLE_EQ(exact_conv_spectrum(delta_identity(3, n, Padding::circular)).value, 1.0);
  const auto m = gaussian_matrix(2, 4, 12);
  EXPECT_NEAR(exact_conv_spectrum(pointwise(m, 6, Padding::circular)).value, spectral_norm_exact(m),
              1e-12);
}

TEST(ExactConvSpectrum, MatchesMaterializedOperator) {
  const auto kernel = seeded(3, 2, 3, 5, 13);
  EXPECT_LE(oracle::relative_error(exact_conv_spectrum(kernel).value,
                                   spectral_norm_exact(oracle::conv_operator_by_definition(kernel))),
            1e-10);
}

TEST(ConvSpectrum, ShiftInvariant) {
  const auto kernel = seeded(2, 3, 3, 7, 14);
  const double g0 = gram_conv(kernel, 10).value;
  const double e0 = exact_conv_spectrum(kernel).value;
  for (auto [dr, dc] : {std::pair<std::size_t, std::size_t>{1, 0}, {2, 5}, {6, 6}}) {
    const auto shifted = circular_shift(kernel, dr, dc);
    EXPECT_LE(oracle::relative_error(gram_conv(shifted, 10).value, g0), 1e-10);
    EXPECT_LE(oracle::relative_error(exact_conv_spectrum(shifted).value, e0), 1e-10);
  }
}

TEST(ConvSpectrum, AdjointKernelHasSameNorm) {
  const auto kernel = seeded(2, 4, 3, 6, 15);
  EXPECT_LE(oracle::relative_error(exact_conv_spectrum(adjoint_kernel(kernel)).value,
                                   exact_conv_spectrum(kernel).value),
            1e-10);
}

TEST(ConvSpectrum, EvenAndOddSizes) {
  for (std::size_t n : {4U, 5U, 9U, 11U, 12U}) {
    const auto kernel = seeded(2, 2, 3, n, 200 + n);
    EXPECT_LE(oracle::relative_error(gram_conv(kernel, 12).value, exact_conv_spectrum(kernel).value),
              1e-8)
        << n;
  }
}

// ---------------------------------------------------------------- power iteration

TEST(ConvPowerIteration, PointwiseIsPaddingIndependent) {
  const auto m = gaussian_matrix(3, 2, 16);
  const double sigma = spectral_norm_exact(m);
  for (auto padding : {Padding::circular, Padding::zero})
    EXPECT_NEAR(conv_power_iteration(pointwise(m, 4, padding), 500, 1).value, sigma, 1e-8);
}

TEST(ConvPowerIteration, DeltaIdentityZeroPadding) {
  EXPECT_NEAR(conv_power_iteration(delta_identity(2, 5, Padding::zero), 3, 0).value, 1.0, 1e-14);
}

TEST(ConvPowerIteration, MatchesMaterializedToeplitz) {
  const auto kernel = seeded(2, 2, 3, 6, 17, Padding::zero);
  const double truth = spectral_norm_exact(oracle::conv_operator_by_definition(kernel));
  EXPECT_NEAR(conv_power_iteration(kernel, 2000, 3).value, truth, 1e-6);
}

TEST(ConvPowerIteration, CircularMatchesExact) {
  const auto kernel = seeded(2, 2, 3, 6, 18);
  EXPECT_LE(oracle::relative_error(conv_power_iteration(kernel, 2000, 4).value,
                                   exact_conv_spectrum(kernel).value),
            1e-6);
}

TEST(ConvPowerIteration, ZeroKernel) {
  RealTensor4 f({2, 2, 3, 3});
  EXPECT_EQ(conv_power_iteration(make_kernel(f, 5, Padding::zero), 10, 0).value, 0.0);
}

// ---------------------------------------------------------------- sub-sampling

TEST(Subsampled, FullSizeIsUnchanged) {
  const auto kernel = seeded(2, 2, 3, 8, 19);
  EXPECT_EQ(gram_conv_subsampled(kernel, 8, 6).value, gram_conv(kernel, 6).value);
}

TEST(Subsampled, PointwiseFactorIsOne) {
  const auto kernel = pointwise(gaussian_matrix(3, 3, 20), 16, Padding::circular);
  EXPECT_DOUBLE_EQ(subsampling_factor(1, 4, 16), 1.0);
  EXPECT_DOUBLE_EQ(gram_conv_subsampled(kernel, 4, 8).value, gram_conv(kernel, 8).value);
}

TEST(Subsampled, BoundsFullSizeFromAbove) {
  const auto kernel = seeded(2, 2, 3, 32, 21);
  const double full = gram_conv(kernel, 12).value;
  const double sub = gram_conv_subsampled(kernel, 8, 12).value;
  EXPECT_GE(sub, full);
  EXPECT_LE(sub / full, 1.0 + 2.0 / 8.0 + 1e-12);
}

TEST(Subsampled, Errors) {
  const auto kernel = seeded(1, 1, 5, 16, 22);
  EXPECT_THROW(gram_conv_subsampled(kernel, 4, 5), InvalidArgument);
  EXPECT_THROW(gram_conv_subsampled(kernel, 17, 5), InvalidArgument);
}

// ---------------------------------------------------------------- LIPK

TEST(Lipk, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = gaussian_filter(1 + seed % 3, 1 + seed % 4, 1 + seed % 5, seed);
    t.data()[0] = -0.0;
    if (t.size() > 1) t.data()[1] = 4.9406564584124654e-324;
    std::stringstream buffer;
    write_lipk(buffer, t);
    const auto back = read_lipk(buffer);
    ASSERT_EQ(back.dims(), t.dims());
    EXPECT_EQ(std::memcmp(back.data().data(), t.data().data(), t.size() * sizeof(double)), 0);
  }
}

TEST(Lipk, HeaderLayout) {
  RealTensor4 t({1, 2, 1, 1}, {1.0, -2.0});
  std::stringstream buffer;
  write_lipk(buffer, t);
  const std::string bytes = buffer.str();
  ASSERT_EQ(bytes.size(), 4U + 2U + 16U + 16U);
  EXPECT_EQ(bytes.substr(0, 4), "LIPK");
  EXPECT_EQ(bytes[4], '\x01');
  EXPECT_EQ(bytes[5], '\x00');
  EXPECT_EQ(bytes[6], '\x01');   // c_out, little-endian
  EXPECT_EQ(bytes[10], '\x02');  // c_in
  // 1.0 = 0x3FF0000000000000, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[22 + 7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[22 + 6]), 0xF0);
}

TEST(Lipk, RejectsMalformedInput) {
  auto parse = [](const std::string& bytes) {
    std::stringstream in(bytes);
    return read_lipk(in);
  };
  EXPECT_THROW(parse("XXXX"), FormatError);
  EXPECT_THROW(parse(std::string("LIPK\x02\x00", 6)), FormatError);
  EXPECT_THROW(parse(std::string("LIPK\x01\x00\x01\x00\x00\x00", 10)), FormatError);

  RealTensor4 t({1, 1, 1, 1}, {3.0});
  std::stringstream ok;
  write_lipk(ok, t);
  std::string truncated = ok.str();
  truncated.pop_back();
  EXPECT_THROW(parse(truncated), FormatError);
  EXPECT_THROW(parse(ok.str() + "x"), FormatError);
  EXPECT_THROW(read_lipk(std::filesystem::path("/nonexistent/file.lipk")), FormatError);
}

TEST(Lipk, MatrixFilesUseUnitSpatialDims) {
  const auto dir = std::filesystem::temp_directory_path() / "lip4_lipk_test";
  std::filesystem::create_directories(dir);
  const auto m = gaussian_matrix(3, 5, 23);
  write_lipk_matrix(dir / "m.lipk", m);
  EXPECT_EQ(frobenius_norm(read_lipk_matrix(dir / "m.lipk") - m), 0.0);
  write_lipk(dir / "k.lipk", gaussian_filter(2, 2, 3, 0));
  EXPECT_THROW(read_lipk_matrix(dir / "k.lipk"), FormatError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lip4
