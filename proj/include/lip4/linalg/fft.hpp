#pragma once

#include <span>
#include <vector>

#include "lip4/linalg/complex_matrix.hpp"

namespace lip4 {

// Forward transforms use the unnormalized negative-exponent convention
//   Y_k = sum_j x_j exp(-2 pi i jk / n).

/// In-place 1-D DFT. Mixed-radix for composite lengths; prime factors fall back
/// to direct summation.
void dft(std::span<Complex> x);

/// 2-D DFT of a rows x cols matrix, applied along rows then columns.
ComplexMatrix dft2(const ComplexMatrix& x);

/// dft2 of `x` zero-padded to rows x cols (x sits in the top-left corner).
/// Rows that are entirely padding are skipped in the row pass.
ComplexMatrix dft2_padded(const ComplexMatrix& x, std::size_t rows, std::size_t cols);

/// Inverse of dft2, including the 1/(rows*cols) factor.
ComplexMatrix idft2(const ComplexMatrix& x);

}  // namespace lip4
