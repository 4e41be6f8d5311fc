#include "lip4/linalg/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lip4/error.hpp"

namespace lip4 {

namespace {

bool finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Plain sum of squared moduli; may overflow or underflow.
double sum_squares(std::span<const Complex> values) noexcept {
  double s = 0.0;
  for (const auto& z : values) s += z.real() * z.real() + z.imag() * z.imag();
  return s;
}

// LAPACK-style scaled accumulation, used only when the plain sum leaves the safe range.
double scaled_norm(std::span<const Complex> values) noexcept {
  double scale = 0.0;
  double ssq = 1.0;
  auto accumulate = [&](double x) {
    if (x == 0.0) return;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  };
  for (const auto& z : values) {
    accumulate(z.real());
    accumulate(z.imag());
  }
  return scale * std::sqrt(ssq);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    std::ostringstream msg;
    msg << "ComplexMatrix: " << data_.size() << " entries do not fill a " << rows_ << "x"
        << cols_ << " matrix";
    throw InvalidArgument(msg.str());
  }
  if (!all_finite()) throw InvalidArgument("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(const std::vector<std::vector<Complex>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<Complex> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw InvalidArgument("ComplexMatrix::from_rows: ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return {rows.size(), cols, std::move(entries)};
}

std::vector<Complex> ComplexMatrix::column(std::size_t c) const {
  std::vector<Complex> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::string ComplexMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) noexcept {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(double s) noexcept {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("matrix sum: shapes " + shape_string() + " and " +
                          other.shape_string() + " differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw InvalidArgument("matrix difference: shapes " + shape_string() + " and " +
                          other.shape_string() + " differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), finite);
}

ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= s; }
ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw InvalidArgument("matmul: shapes " + a.shape_string() + " and " + b.shape_string() +
                          " are incompatible");
  ComplexMatrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* crow = &c(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      const Complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

ComplexMatrix gram(const ComplexMatrix& a) {
  // Accumulate rank-one updates conj(a_k)^T a_k over rows k, upper triangle only.
  // Real and imaginary parts are kept in separate arrays so the inner loop vectorizes.
  const std::size_t p = a.rows();
  const std::size_t q = a.cols();
  std::vector<double> re(p * q);
  std::vector<double> im(p * q);
  for (std::size_t i = 0; i < p * q; ++i) {
    re[i] = a.data()[i].real();
    im[i] = a.data()[i].imag();
  }
  std::vector<double> g_re(q * q, 0.0);
  std::vector<double> g_im(q * q, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const double* rr = &re[k * q];
    const double* ri = &im[k * q];
    for (std::size_t i = 0; i < q; ++i) {
      const double cr = rr[i];
      const double ci = ri[i];
      if (cr == 0.0 && ci == 0.0) continue;
      double* out_re = &g_re[i * q];
      double* out_im = &g_im[i * q];
      // (cr - i ci) * (rr + i ri)
      for (std::size_t j = i; j < q; ++j) {
        out_re[j] += cr * rr[j] + ci * ri[j];
        out_im[j] += cr * ri[j] - ci * rr[j];
      }
    }
  }
  ComplexMatrix g(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    g(i, i) = g_re[i * q + i];
    for (std::size_t j = i + 1; j < q; ++j) {
      g(i, j) = Complex(g_re[i * q + j], g_im[i * q + j]);
      g(j, i) = Complex(g_re[i * q + j], -g_im[i * q + j]);
    }
  }
  return g;
}

ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = std::conj(a(r, c));
  return t;
}

double frobenius_norm(std::span<const Complex> values) noexcept {
  const double s = sum_squares(values);
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  if (std::isfinite(s) && s > tiny) return std::sqrt(s);
  return scaled_norm(values);
}

double frobenius_norm(const ComplexMatrix& a) noexcept { return frobenius_norm(a.data()); }

double vector_norm(std::span<const Complex> v) noexcept { return frobenius_norm(v); }

std::vector<Complex> apply(const ComplexMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.cols())
    throw InvalidArgument("apply: vector of length " + std::to_string(x.size()) +
                          " does not match " + a.shape_string());
  std::vector<Complex> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    const Complex* row = &a(i, 0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<Complex> apply_adjoint(const ComplexMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.rows())
    throw InvalidArgument("apply_adjoint: vector of length " + std::to_string(x.size()) +
                          " does not match " + a.shape_string());
  std::vector<Complex> y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Complex* row = &a(i, 0);
    const Complex xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += std::conj(row[j]) * xi;
  }
  return y;
}

Complex inner_product(std::span<const Complex> x, std::span<const Complex> y) noexcept {
  Complex s{};
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

}  // namespace lip4
