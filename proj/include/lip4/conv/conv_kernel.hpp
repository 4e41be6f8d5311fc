#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lip4/linalg/tensor.hpp"

namespace lip4 {

enum class Padding { circular, zero };

std::string_view to_string(Padding padding) noexcept;
Padding parse_padding(std::string_view name);

/// A multi-channel 2-D convolution: filter (c_out, c_in, k, k) acting on c_in
/// channels of n x n inputs.
///
/// The operator is y_o[r, c] = sum_{i,a,b} K[o,i,a,b] x_i[r - a + s, c - b + s].
/// Circular padding uses s = 0 with indices taken mod n, so the filter is anchored
/// at the origin and the first column of the operator is vec(K). Zero padding uses
/// the centred offset s = floor(k/2) ("same" padding) and drops out-of-range inputs.
struct ConvKernel {
  RealTensor4 filter;
  std::size_t input_size = 0;
  Padding padding = Padding::circular;
  std::size_t stride = 1;

  [[nodiscard]] std::size_t c_out() const noexcept { return filter.dim(0); }
  [[nodiscard]] std::size_t c_in() const noexcept { return filter.dim(1); }
  [[nodiscard]] std::size_t k() const noexcept { return filter.dim(2); }
  [[nodiscard]] std::size_t n() const noexcept { return input_size; }

  /// Checks square spatial support and k <= n. Throws InvalidArgument.
  void validate() const;
  /// validate() plus stride == 1, required by every spectral operation.
  void validate_spectral() const;
};

/// Same filter, different declared input size and padding.
ConvKernel with_geometry(const ConvKernel& kernel, std::size_t n, Padding padding);

/// Applies the operator to x (c_in * n * n values, channel-major then row-major).
std::vector<double> conv_apply(const ConvKernel& kernel, std::span<const double> x);

/// Applies the adjoint operator to y (c_out * n * n values).
std::vector<double> conv_apply_adjoint(const ConvKernel& kernel, std::span<const double> y);

/// Filter of the adjoint circular operator: swaps channels and flips space
/// (K'[i,o,a,b] = K[o,i,-a mod k, -b mod k] after re-anchoring at the origin).
/// Returned with k' = k; valid for circular padding where re-anchoring is a shift.
ConvKernel adjoint_kernel(const ConvKernel& kernel);

/// Every K[o,i] circularly shifted by (dr, dc) on the n x n grid. The result has
/// spatial size n (the shifted support may wrap).
ConvKernel circular_shift(const ConvKernel& kernel, std::size_t dr, std::size_t dc);

}  // namespace lip4
