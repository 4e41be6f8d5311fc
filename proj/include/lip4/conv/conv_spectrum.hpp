#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lip4/conv/conv_kernel.hpp"
#include "lip4/linalg/complex_matrix.hpp"

namespace lip4 {

/// Frequency-domain blocks of a circular convolution: block (u, v) is the
/// c_out x c_in matrix of 2-D DFT coefficients of every K[o, i] at that frequency.
struct BlockDiagSpectrum {
  std::size_t n = 0;
  std::vector<ComplexMatrix> blocks;  // index u * n + v

  [[nodiscard]] const ComplexMatrix& block(std::size_t u, std::size_t v) const {
    return blocks[u * n + v];
  }
};

enum class ConvMethod { gram_conv, exact_svd_per_block, conv_power_iteration, gram_conv_subsampled };

std::string_view to_string(ConvMethod method) noexcept;

struct ConvBoundReport {
  ConvMethod method = ConvMethod::gram_conv;
  double value = 0.0;
  /// Frequency (u, v) attaining the maximum, for the block-based methods.
  std::optional<std::pair<std::size_t, std::size_t>> argmax_block;
  /// Per-iteration value (max over blocks for Gram iteration).
  std::vector<double> trace;
  int iterations = 0;
  double elapsed_seconds = 0.0;
};

/// Pads every K[o, i] to n x n (anchored at the origin) and transforms it.
/// Requires circular padding.
BlockDiagSpectrum extract_blocks(const ConvKernel& kernel);

/// Rescaled Gram iteration run independently on each block; value is
/// max_i ||D_i^(t)||_F^(2^(1-t)), an upper bound on the circular operator norm.
ConvBoundReport gram_conv(const ConvKernel& kernel, int n_iter);

/// Exact operator norm of the circular convolution: max over per-block SVDs.
ConvBoundReport exact_conv_spectrum(const ConvKernel& kernel);

/// Power iteration on the spatial operator and its adjoint, with the kernel's padding.
ConvBoundReport conv_power_iteration(const ConvKernel& kernel, int n_iter, std::uint64_t seed);

/// gram_conv at spatial size n0 <= n, multiplied by (1 + 2 floor(k/2) / n0) when n0 < n.
ConvBoundReport gram_conv_subsampled(const ConvKernel& kernel, std::size_t n0, int n_iter);

/// Compensation factor applied by gram_conv_subsampled.
double subsampling_factor(std::size_t k, std::size_t n0, std::size_t n) noexcept;

/// Largest operator materialize_conv_operator will build, per side.
inline constexpr std::size_t materialize_limit = 4096;

/// Dense (c_out n^2) x (c_in n^2) matrix of the operator, built from unit impulses.
/// Throws InvalidArgument beyond materialize_limit.
ComplexMatrix materialize_conv_operator(const ConvKernel& kernel);

/// True when materialize_conv_operator accepts the kernel's geometry.
bool can_materialize(const ConvKernel& kernel) noexcept;

}  // namespace lip4
