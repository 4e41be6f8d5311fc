#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's fast paths (no FFT, no Gram products, no rescaling).

#include <cmath>
#include <numbers>
#include <vector>

#include "lip4/conv/conv_kernel.hpp"
#include "lip4/linalg/complex_matrix.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"

namespace lip4::oracle {

inline ComplexMatrix triple_loop_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s{};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

/// O(n^4) direct 2-D DFT.
inline ComplexMatrix direct_dft2(const ComplexMatrix& x) {
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  ComplexMatrix y(rows, cols);
  for (std::size_t u = 0; u < rows; ++u)
    for (std::size_t v = 0; v < cols; ++v) {
      Complex s{};
      for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) {
          const double phase = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * a) / static_cast<double>(rows) +
                                static_cast<double>(v * b) / static_cast<double>(cols));
          s += x(a, b) * std::polar(1.0, phase);
        }
      y(u, v) = s;
    }
  return y;
}

/// Unitary DFT matrix U/sqrt(n), U_jk = exp(-2 pi i jk / n).
inline ComplexMatrix unitary_dft_matrix(std::size_t n) {
  ComplexMatrix u(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      u(j, k) = scale * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                                            static_cast<double>(n));
  return u;
}

/// (sum_i sigma_i^p)^(1/p) with p = 2^t, evaluated stably from the singular values.
inline double schatten_power_of_two(const std::vector<double>& sigma, int t) {
  const double top = sigma.front();
  if (top == 0.0) return 0.0;
  const double p = std::ldexp(1.0, t);
  double s = 0.0;
  for (double x : sigma) s += std::pow(x / top, p);
  return top * std::pow(s, 1.0 / p);
}

/// Operator matrix built straight from the convolution sum, without going through
/// conv_apply: W[(o, r, c), (i, r', c')] += K[o,i,a,b] whenever the source pixel
/// of output (r, c) for tap (a, b) is (r', c').
inline ComplexMatrix conv_operator_by_definition(const ConvKernel& kernel) {
  const std::size_t n = kernel.n();
  const std::size_t k = kernel.k();
  const long ln = static_cast<long>(n);
  const long s = kernel.padding == Padding::circular ? 0 : static_cast<long>(k / 2);
  ComplexMatrix w(kernel.c_out() * n * n, kernel.c_in() * n * n);
  for (std::size_t o = 0; o < kernel.c_out(); ++o)
    for (std::size_t i = 0; i < kernel.c_in(); ++i)
      for (long r = 0; r < ln; ++r)
        for (long c = 0; c < ln; ++c)
          for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
              long sr = r - static_cast<long>(a) + s;
              long sc = c - static_cast<long>(b) + s;
              if (kernel.padding == Padding::circular) {
                sr = ((sr % ln) + ln) % ln;
                sc = ((sc % ln) + ln) % ln;
              } else if (sr < 0 || sr >= ln || sc < 0 || sc >= ln) {
                continue;
              }
              w(o * n * n + static_cast<std::size_t>(r * ln + c),
                i * n * n + static_cast<std::size_t>(sr * ln + sc)) += kernel.filter(o, i, a, b);
            }
  return w;
}

/// Q1 diag(sigma) Q2^* with Haar-like orthonormal factors from seeded Gaussians.
inline ComplexMatrix with_singular_values(std::size_t rows, std::size_t cols,
                                          const std::vector<double>& sigma, std::uint64_t seed,
                                          bool complex_entries = true) {
  const std::size_t m = sigma.size();
  const auto q1 = svd(gaussian_matrix(rows, m, seed, complex_entries)).left_vectors;
  const auto q2 = svd(gaussian_matrix(cols, m, seed + 7919, complex_entries)).left_vectors;
  ComplexMatrix scaled = q1;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < m; ++c) scaled(r, c) *= sigma[c];
  return matmul(scaled, conj_transpose(q2));
}

/// Central finite differences of f with respect to the real and imaginary part of
/// every entry, combined as d/dRe + i d/dIm (imaginary part only for complex input).
template <typename F>
ComplexMatrix finite_difference_gradient(const ComplexMatrix& g, F&& f, double step,
                                         bool complex_entries) {
  ComplexMatrix grad(g.rows(), g.cols());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    ComplexMatrix plus = g;
    ComplexMatrix minus = g;
    plus.data()[idx] += step;
    minus.data()[idx] -= step;
    double re = (f(plus) - f(minus)) / (2.0 * step);
    double im = 0.0;
    if (complex_entries) {
      plus = g;
      minus = g;
      plus.data()[idx] += Complex(0.0, step);
      minus.data()[idx] -= Complex(0.0, step);
      im = (f(plus) - f(minus)) / (2.0 * step);
    }
    grad.data()[idx] = Complex(re, im);
  }
  return grad;
}

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

}  // namespace lip4::oracle
