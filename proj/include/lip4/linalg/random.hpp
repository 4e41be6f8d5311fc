#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lip4/linalg/complex_matrix.hpp"
#include "lip4/linalg/tensor.hpp"

namespace lip4 {

using Rng = std::mt19937_64;

/// Standard Gaussian entries; imaginary parts drawn too when `complex_entries`.
ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              bool complex_entries = false);

/// Unit-norm standard Gaussian vector drawn from `rng`.
std::vector<Complex> gaussian_unit_vector(std::size_t n, Rng& rng);

/// Standard Gaussian filter of shape (c_out, c_in, k, k).
RealTensor4 gaussian_filter(std::size_t c_out, std::size_t c_in, std::size_t k,
                            std::uint64_t seed);

}  // namespace lip4
