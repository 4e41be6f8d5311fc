#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"
#include "support/oracles.hpp"

namespace lip4 {
namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  return ComplexMatrix::diagonal(std::vector<double>(values));
}

// ---------------------------------------------------------------- power iteration

TEST(PowerIteration, DiagonalCases) {
  EXPECT_NEAR(power_iteration(diag({3.0, 1.0}), 200, 1).value, 3.0, 1e-10);
  for (int n_iter : {1, 2, 10}) EXPECT_NEAR(power_iteration(diag({2.0, 2.0}), n_iter, 5).value, 2.0, 1e-12);
}

TEST(PowerIteration, GaussianMatchesSvd) {
  const auto g = gaussian_matrix(200, 100, 42);
  const double sigma = spectral_norm_exact(g);
  const auto r = power_iteration(g, 1000, 7);
  EXPECT_LE(oracle::relative_error(r.value, sigma), 1e-5);
  EXPECT_EQ(r.trace.size(), 1000U);
  EXPECT_EQ(r.value, r.trace.back());
}

TEST(PowerIteration, NeverCertifiesAnUpperBound) {
  const auto g = gaussian_matrix(200, 100, 43);
  const double sigma = spectral_norm_exact(g);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    EXPECT_LE(power_iteration(g, 100, seed).value, sigma * (1.0 + 1e-9));
}

TEST(PowerIteration, SeedsChangeTheRun) {
  const auto g = gaussian_matrix(60, 40, 3);
  EXPECT_NE(power_iteration(g, 20, 1).value, power_iteration(g, 20, 2).value);
  EXPECT_EQ(power_iteration(g, 20, 1).value, power_iteration(g, 20, 1).value);
}

TEST(PowerIteration, ZeroMatrix) {
  const auto r = power_iteration(ComplexMatrix(3, 2), 10, 0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.trace.empty());
}

// ---------------------------------------------------------------- naive Gram

TEST(GramNaive, ClosedForms) {
  EXPECT_DOUBLE_EQ(gram_naive(diag({2.0, 0.0}), 5).value, 2.0);
  EXPECT_NEAR(gram_naive(ComplexMatrix::identity(2), 3).value, std::pow(2.0, 1.0 / 8.0), 1e-15);
  EXPECT_NEAR(gram_naive(ComplexMatrix::identity(2), 3).value, 1.0905077, 1e-7);
}

TEST(GramNaive, OverflowsWhereRescaledDoesNot) {
  const double entry = 1e20 / std::sqrt(2.0);  // ||G||_F = 1e20
  const auto g = diag({entry, entry});
  EXPECT_THROW(gram_naive(g, 4), NumericalError);
  EXPECT_NEAR(gram_rescaled(g, 4).value / entry, std::pow(2.0, 1.0 / 16.0), 1e-14);
}

// ---------------------------------------------------------------- rescaled Gram

TEST(GramRescaled, ClosedForms) {
  for (int n_iter : {1, 2, 5, 12}) EXPECT_NEAR(gram_rescaled(diag({2.0, 0.0}), n_iter).value, 2.0, 1e-12);
  const auto identity = ComplexMatrix::identity(2);
  EXPECT_NEAR(gram_rescaled(identity, 3).value, gram_naive(identity, 3).value, 1e-15);
}

TEST(GramRescaled, ZeroMatrix) {
  const auto r = gram_rescaled(ComplexMatrix(4, 3), 6);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.trace.empty());
}

TEST(GramRescaled, HugeScaleMatchesUnscaledCopy) {
  const auto g = gaussian_matrix(50, 30, 8);
  const auto huge = g * (1e200 / frobenius_norm(g));
  const auto unit = g * (1.0 / frobenius_norm(g));
  for (int t : {1, 4, 9, 12}) {
    const double big = gram_rescaled(huge, t).value;
    EXPECT_LE(oracle::relative_error(big, 1e200 * gram_rescaled(unit, t).value), 1e-10);
    EXPECT_LE(oracle::relative_error(big / 1e200, oracle::schatten_power_of_two(singular_values(unit), t)),
              1e-10);
  }
}

TEST(GramRescaled, SchattenIdentityUpperBoundAndMonotone) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto g = gaussian_matrix(12 + seed, 7 + 2 * seed, seed, seed % 2 == 0);
    const auto sigma = singular_values(g);
    const auto r = gram_rescaled(g, 12);
    ASSERT_EQ(r.trace.size(), 12U);
    for (int t = 1; t <= 12; ++t) {
      const double v = r.trace[static_cast<std::size_t>(t - 1)];
      EXPECT_LE(oracle::relative_error(v, oracle::schatten_power_of_two(sigma, t)), 1e-9) << t;
      EXPECT_GE(v, sigma[0] * (1.0 - 1e-9));
      if (t > 1) EXPECT_LE(v, r.trace[static_cast<std::size_t>(t - 2)] * (1.0 + 1e-12));
    }
  }
}

TEST(GramRescaled, ScaleEquivariance) {
  const auto g = gaussian_matrix(9, 6, 17, true);
  const double base = gram_rescaled(g, 10).value;
  for (double c : {1e-30, 1.0, 1e30, -1e30}) {
    EXPECT_LE(oracle::relative_error(gram_rescaled(g * c, 10).value, std::abs(c) * base), 1e-12) << c;
  }
}

TEST(GramRescaled, DegenerateTopIsQLinearHalf) {
  const auto g = diag({4.0, 4.0, 2.0});
  const auto r = gram_rescaled(g, 9);
  for (int t = 3; t <= 8; ++t) {
    const double e0 = r.trace[static_cast<std::size_t>(t - 1)] / 4.0 - 1.0;
    const double e1 = r.trace[static_cast<std::size_t>(t)] / 4.0 - 1.0;
    EXPECT_NEAR(e1 / e0, 0.5, 0.05) << t;
  }
}

TEST(GramRescaled, SuperlinearWhenGapped) {
  const auto g = oracle::with_singular_values(7, 5, {1.0, 0.8, 0.5, 0.3, 0.1}, 5);
  const double sigma = spectral_norm_exact(g);
  const auto r = gram_rescaled(g, 12);
  int checked = 0;
  for (std::size_t t = 0; t + 1 < r.trace.size(); ++t) {
    const double e0 = r.trace[t] / sigma - 1.0;
    const double e1 = r.trace[t + 1] / sigma - 1.0;
    if (e0 > 1e-12 && e0 < 1e-2) {
      EXPECT_LE(e1, std::pow(e0, 1.5)) << "t = " << t + 1;
      ++checked;
    }
  }
  EXPECT_GE(checked, 2);
}

TEST(ScaledGram, IterateIsHermitianPsdAndBoundFinite) {
  ScaledGram state(gaussian_matrix(6, 4, 2, true));
  Rng rng(9);
  for (int t = 2; t <= 8; ++t) {
    state.step();
    const auto& it = state.iterate();
    EXPECT_LE(frobenius_norm(it - conj_transpose(it)), 1e-14 * frobenius_norm(it));
    const auto x = gaussian_unit_vector(it.cols(), rng);
    EXPECT_GE(lip4::inner_product(x, lip4::apply(it, x)).real(), -1e-14);
    EXPECT_TRUE(std::isfinite(state.bound()));
  }
}

TEST(GramRescaled, RejectsBadIterationCount) {
  EXPECT_THROW(gram_rescaled(ComplexMatrix::identity(2), 0), InvalidArgument);
}

// ---------------------------------------------------------------- gradient

TEST(GramGradient, FrobeniusCase) {
  const auto g = diag({3.0, 1.0});
  const auto grad = gram_bound_gradient(g, 1);
  EXPECT_LE(frobenius_norm(grad - g * (1.0 / std::sqrt(10.0))), 1e-15);

  const auto e11 = diag({1.0, 0.0});
  EXPECT_LE(frobenius_norm(gram_bound_gradient(e11, 1) - e11), 1e-15);
}

double max_relative_entry_error(const ComplexMatrix& value, const ComplexMatrix& reference) {
  double top = 0.0;
  for (const auto& z : reference.data()) top = std::max(top, std::abs(z));
  double worst = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double denom = std::max(std::abs(reference.data()[i]), 1e-6 * top);
    worst = std::max(worst, std::abs(value.data()[i] - reference.data()[i]) / denom);
  }
  return worst;
}

TEST(GramGradient, MatchesFiniteDifferences) {
  const auto g = gaussian_matrix(6, 4, 123);
  for (int t : {1, 2, 4}) {
    auto f = [t](const ComplexMatrix& m) { return gram_rescaled(m, t).value; };
    const auto fd = oracle::finite_difference_gradient(g, f, 1e-6, false);
    EXPECT_LE(max_relative_entry_error(gram_bound_gradient(g, t), fd), 1e-5) << "t = " << t;
  }
}

TEST(GramGradient, ComplexEntriesUseReImConvention) {
  const auto g = gaussian_matrix(4, 3, 321, true);
  auto f = [](const ComplexMatrix& m) { return gram_rescaled(m, 3).value; };
  const auto fd = oracle::finite_difference_gradient(g, f, 1e-6, true);
  EXPECT_LE(max_relative_entry_error(gram_bound_gradient(g, 3), fd), 1e-5);
}

TEST(GramGradient, DegreeZeroInPositiveScaling) {
  const auto g = gaussian_matrix(5, 4, 99);
  const auto base = gram_bound_gradient(g, 5);
  for (double c : {1e-40, 3.0, 1e40})
    EXPECT_LE(frobenius_norm(gram_bound_gradient(g * c, 5) - base), 1e-12 * frobenius_norm(base));
}

TEST(GramGradient, ZeroMatrixThrows) {
  EXPECT_THROW(gram_bound_gradient(ComplexMatrix(2, 2), 3), NumericalError);
}

// ---------------------------------------------------------------- singular vectors

double phase_free_distance(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  // 1 - |<x, y>| for unit vectors.
  return 1.0 - std::abs(lip4::inner_product(x, y));
}

TEST(SingularVectors, Diagonal) {
  const auto r = singular_vectors(diag({3.0, 1.0}), 12);
  EXPECT_NEAR(r.sigma, 3.0, 1e-12);
  EXPECT_NEAR(std::abs(r.right[0]), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.left[0]), 1.0, 1e-12);
}

TEST(SingularVectors, RankOneClosedForm) {
  const auto a = gaussian_matrix(5, 1, 1);
  const auto b = gaussian_matrix(4, 1, 2);
  const auto g = matmul(a, conj_transpose(b));
  const auto r = singular_vectors(g, 6);
  const double na = frobenius_norm(a);
  const double nb = frobenius_norm(b);
  EXPECT_NEAR(r.sigma, na * nb, 1e-8 * na * nb);
  auto normalized = [](const ComplexMatrix& m, double n) {
    std::vector<Complex> v(m.data().begin(), m.data().end());
    for (auto& z : v) z /= n;
    return v;
  };
  EXPECT_LE(phase_free_distance(r.right, normalized(b, nb)), 1e-8);
  EXPECT_LE(phase_free_distance(r.left, normalized(a, na)), 1e-8);
}

TEST(SingularVectors, GaussianResidualAndSvdAgreement) {
  const auto g = gaussian_matrix(40, 25, 77);
  const auto r = singular_vectors(g, 12);
  auto residual = lip4::apply(g, r.right);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= r.sigma * r.left[i];
  EXPECT_LE(vector_norm(residual), 1e-6 * r.sigma);

  const auto ref = svd(g);
  EXPECT_LE(phase_free_distance(r.right, ref.right_vectors.column(0)), 1e-10);
  EXPECT_LE(phase_free_distance(r.left, ref.left_vectors.column(0)), 1e-10);
}

TEST(SingularVectors, NeedsAtLeastOneProduct) {
  EXPECT_THROW(singular_vectors(diag({3.0, 1.0}), 1), InvalidArgument);
  EXPECT_THROW(singular_vectors(ComplexMatrix(2, 2), 5), NumericalError);
}

// ---------------------------------------------------------------- eigen variant

TEST(GramEigen, SpectralRadiusOfDiagonal) {
  EXPECT_NEAR(gram_eigen(diag({-5.0, 2.0}), 8).value, 5.0, 1e-10);
}

TEST(GramEigen, RotationConvergesToUnitModulus) {
  const double c = std::cos(std::numbers::pi / 6.0);
  const double s = std::sin(std::numbers::pi / 6.0);
  const auto rot = ComplexMatrix::from_rows({{c, -s}, {s, c}});
  const auto r = gram_eigen(rot, 10);
  EXPECT_GE(r.value, 1.0 - 1e-12);
  EXPECT_LE(r.value, std::pow(2.0, std::ldexp(1.0, -10)) + 1e-12);
  for (std::size_t t = 0; t < r.trace.size(); ++t)
    EXPECT_NEAR(r.trace[t], std::pow(2.0, std::ldexp(1.0, -static_cast<int>(t + 1))), 1e-12);
}

TEST(GramEigen, SymmetricMatchesLargestEigenvalueModulus) {
  const auto a = gaussian_matrix(8, 8, 55);
  const auto sym = a + conj_transpose(a);
  EXPECT_LE(oracle::relative_error(gram_eigen(sym, 12).value, spectral_norm_exact(sym)), 1e-8);
}

TEST(GramEigen, UpperBoundsSpectralRadiusOfNonNormal) {
  const auto g = ComplexMatrix::from_rows({{1.0, 10.0}, {0.0, 0.5}});
  const auto r = gram_eigen(g, 14);
  for (double v : r.trace) EXPECT_GE(v, 1.0 - 1e-12);
  EXPECT_LE(r.value, 1.01);
}

TEST(GramEigen, RejectsRectangularAndHandlesZero) {
  EXPECT_THROW(gram_eigen(ComplexMatrix(2, 3), 4), InvalidArgument);
  EXPECT_EQ(gram_eigen(ComplexMatrix(3, 3), 4).value, 0.0);
}

TEST(DenseMethod, NamesRoundTrip) {
  for (auto m : {DenseMethod::power_iteration, DenseMethod::gram_naive, DenseMethod::gram_rescaled,
                 DenseMethod::svd_exact, DenseMethod::gram_eigen})
    EXPECT_EQ(parse_dense_method(to_string(m)), m);
  EXPECT_THROW(parse_dense_method("lanczos"), InvalidArgument);
}

}  // namespace
}  // namespace lip4
