#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lip4 {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Entries are checked finite on construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  /// Zero-filled rows x cols matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> values);
  /// Builds from nested rows; all rows must have equal length.
  static ComplexMatrix from_rows(const std::vector<std::vector<Complex>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  [[nodiscard]] std::span<Complex> data() noexcept { return data_; }
  [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }

  [[nodiscard]] std::vector<Complex> column(std::size_t c) const;

  /// "RxC", used in error messages.
  [[nodiscard]] std::string shape_string() const;

  ComplexMatrix& operator*=(Complex s) noexcept;
  ComplexMatrix& operator*=(double s) noexcept;
  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);

  /// True if every entry has finite real and imaginary parts.
  [[nodiscard]] bool all_finite() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator*(ComplexMatrix a, double s);
ComplexMatrix operator*(double s, ComplexMatrix a);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);

/// Dense product a * b. Throws InvalidArgument when a.cols != b.rows.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// a^* a, exploiting the Hermitian result (only the upper triangle is computed).
ComplexMatrix gram(const ComplexMatrix& a);

/// Conjugate transpose.
ComplexMatrix conj_transpose(const ComplexMatrix& a);

/// Overflow-safe sqrt(sum |a_ij|^2).
double frobenius_norm(const ComplexMatrix& a) noexcept;
double frobenius_norm(std::span<const Complex> values) noexcept;

/// Euclidean norm of a vector, overflow-safe.
double vector_norm(std::span<const Complex> v) noexcept;

/// Matrix-vector product.
std::vector<Complex> apply(const ComplexMatrix& a, std::span<const Complex> x);
/// a^* x without forming the conjugate transpose.
std::vector<Complex> apply_adjoint(const ComplexMatrix& a, std::span<const Complex> x);

/// sum conj(x_i) y_i
Complex inner_product(std::span<const Complex> x, std::span<const Complex> y) noexcept;

}  // namespace lip4
