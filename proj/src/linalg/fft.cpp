#include "lip4/linalg/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lip4/error.hpp"

namespace lip4 {

namespace {

std::size_t smallest_factor(std::size_t n) {
  if (n % 2 == 0) return 2;
  for (std::size_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return f;
  return n;
}

// Twiddle table w[j] = exp(-2 pi i j / n).
std::vector<Complex> twiddles(std::size_t n) {
  std::vector<Complex> w(n);
  for (std::size_t j = 0; j < n; ++j)
    w[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) /
                                static_cast<double>(n));
  return w;
}

// Decimation in time on the smallest prime factor p: transform the p interleaved
// subsequences into consecutive slices of `out`, then combine in place. With
// p == n this is the direct sum. `tmp` holds at least p values.
void transform(const Complex* in, std::size_t stride, std::size_t n, Complex* out,
               const std::vector<Complex>& w, std::size_t w_step, Complex* tmp) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = smallest_factor(n);
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r)
    transform(in + r * stride, stride * p, m, out + r * m, w, w_step * p, tmp);
  if (p == 2) {
    for (std::size_t k = 0; k < m; ++k) {
      const Complex a = out[k];
      const Complex b = w[k * w_step] * out[m + k];
      out[k] = a + b;
      out[m + k] = a - b;
    }
    return;
  }
  // exp(-2 pi i r k / n) == w[r k w_step], exp(-2 pi i j / p) == w[j root]
  const std::size_t root = w_step * m;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < p; ++r) tmp[r] = w[r * k * w_step] * out[r * m + k];
    for (std::size_t q = 0; q < p; ++q) {
      Complex s{};
      for (std::size_t r = 0; r < p; ++r) s += tmp[r] * w[((r * q) % p) * root];
      out[q * m + k] = s;
    }
  }
}

// Twiddles plus scratch for repeated transforms of one length. Powers of two take
// an iterative radix-2 path with a bit-reversal permutation.
struct Plan {
  explicit Plan(std::size_t n) : w(twiddles(n)), in(n), out(n), tmp(n) {
    if (n > 1 && (n & (n - 1)) == 0) {
      bitrev.resize(n);
      std::size_t bits = 0;
      while ((std::size_t{1} << bits) < n) ++bits;
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) r |= ((j >> b) & 1U) << (bits - 1 - b);
        bitrev[j] = r;
      }
    }
  }

  void run(Complex* x, std::size_t stride) {
    const std::size_t n = w.size();
    if (bitrev.empty()) {
      for (std::size_t j = 0; j < n; ++j) in[j] = x[j * stride];
      transform(in.data(), 1, n, out.data(), w, 1, tmp.data());
    } else {
      for (std::size_t j = 0; j < n; ++j) out[bitrev[j]] = x[j * stride];
      for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len)
          for (std::size_t k = 0; k < half; ++k) {
            const Complex a = out[start + k];
            const Complex b = w[k * step] * out[start + k + half];
            out[start + k] = a + b;
            out[start + k + half] = a - b;
          }
      }
    }
    for (std::size_t j = 0; j < n; ++j) x[j * stride] = out[j];
  }

  std::vector<Complex> w;
  std::vector<Complex> in;
  std::vector<Complex> out;
  std::vector<Complex> tmp;
  std::vector<std::size_t> bitrev;
};

}  // namespace

void dft(std::span<Complex> x) {
  if (x.empty()) throw InvalidArgument("dft: empty input");
  Plan(x.size()).run(x.data(), 1);
}

ComplexMatrix dft2(const ComplexMatrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw InvalidArgument("dft2: empty input");
  ComplexMatrix y = x;
  Plan row(x.cols());
  for (std::size_t r = 0; r < y.rows(); ++r) row.run(&y(r, 0), 1);
  Plan col(x.rows());
  for (std::size_t c = 0; c < y.cols(); ++c) col.run(&y(0, c), y.cols());
  return y;
}

ComplexMatrix dft2_padded(const ComplexMatrix& x, std::size_t rows, std::size_t cols) {
  if (x.rows() == 0 || x.cols() == 0) throw InvalidArgument("dft2_padded: empty input");
  if (x.rows() > rows || x.cols() > cols)
    throw InvalidArgument("dft2_padded: " + x.shape_string() + " does not fit in " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  ComplexMatrix y(rows, cols);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) = x(r, c);
  Plan row(cols);
  for (std::size_t r = 0; r < x.rows(); ++r) row.run(&y(r, 0), 1);
  Plan col(rows);
  for (std::size_t c = 0; c < cols; ++c) col.run(&y(0, c), cols);
  return y;
}

ComplexMatrix idft2(const ComplexMatrix& x) {
  // conj(DFT(conj(x))) / N
  ComplexMatrix y = x;
  for (auto& z : y.data()) z = std::conj(z);
  y = dft2(y);
  const double scale = 1.0 / static_cast<double>(y.size());
  for (auto& z : y.data()) z = std::conj(z) * scale;
  return y;
}

}  // namespace lip4
