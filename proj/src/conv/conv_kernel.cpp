#include "lip4/conv/conv_kernel.hpp"

#include <string>

#include "lip4/error.hpp"

namespace lip4 {

std::string_view to_string(Padding padding) noexcept {
  return padding == Padding::circular ? "circular" : "zero";
}

Padding parse_padding(std::string_view name) {
  if (name == "circular") return Padding::circular;
  if (name == "zero") return Padding::zero;
  throw InvalidArgument("unknown padding '" + std::string(name) + "' (expected circular or zero)");
}

void ConvKernel::validate() const {
  if (filter.size() == 0) throw InvalidArgument("conv kernel: empty filter");
  if (filter.dim(2) != filter.dim(3))
    throw InvalidArgument("conv kernel: spatial support must be square, got " +
                          std::to_string(filter.dim(2)) + "x" + std::to_string(filter.dim(3)));
  if (input_size == 0) throw InvalidArgument("conv kernel: input size must be positive");
  if (k() > input_size)
    throw InvalidArgument("conv kernel: k = " + std::to_string(k()) + " exceeds input size n = " +
                          std::to_string(input_size));
  if (stride == 0) throw InvalidArgument("conv kernel: stride must be positive");
}

void ConvKernel::validate_spectral() const {
  validate();
  if (stride != 1)
    throw InvalidArgument("conv kernel: spectral bounds require stride 1, got " +
                          std::to_string(stride));
}

ConvKernel with_geometry(const ConvKernel& kernel, std::size_t n, Padding padding) {
  ConvKernel out = kernel;
  out.input_size = n;
  out.padding = padding;
  return out;
}

namespace {

struct Geometry {
  std::size_t c_out, c_in, k, n;
  long offset;
  bool circular;
};

Geometry geometry(const ConvKernel& kernel) {
  kernel.validate();
  const bool circular = kernel.padding == Padding::circular;
  return {kernel.c_out(), kernel.c_in(), kernel.k(), kernel.n(),
          circular ? 0L : static_cast<long>(kernel.k() / 2), circular};
}

// Maps a possibly out-of-range coordinate onto the grid; -1 when it falls in the zero pad.
long wrap(long x, long n, bool circular) noexcept {
  if (circular) return ((x % n) + n) % n;
  return (x < 0 || x >= n) ? -1 : x;
}

}  // namespace

std::vector<double> conv_apply(const ConvKernel& kernel, std::span<const double> x) {
  const auto g = geometry(kernel);
  const std::size_t plane = g.n * g.n;
  if (x.size() != g.c_in * plane)
    throw InvalidArgument("conv_apply: input length " + std::to_string(x.size()) +
                          " != c_in * n^2 = " + std::to_string(g.c_in * plane));
  const long n = static_cast<long>(g.n);
  std::vector<double> y(g.c_out * plane, 0.0);
  for (std::size_t o = 0; o < g.c_out; ++o)
    for (std::size_t i = 0; i < g.c_in; ++i) {
      const double* xi = x.data() + i * plane;
      double* yo = y.data() + o * plane;
      for (std::size_t a = 0; a < g.k; ++a)
        for (std::size_t b = 0; b < g.k; ++b) {
          const double w = kernel.filter(o, i, a, b);
          if (w == 0.0) continue;
          for (long r = 0; r < n; ++r) {
            const long src_r = wrap(r - static_cast<long>(a) + g.offset, n, g.circular);
            if (src_r < 0) continue;
            for (long c = 0; c < n; ++c) {
              const long src_c = wrap(c - static_cast<long>(b) + g.offset, n, g.circular);
              if (src_c < 0) continue;
              yo[r * n + c] += w * xi[src_r * n + src_c];
            }
          }
        }
    }
  return y;
}

std::vector<double> conv_apply_adjoint(const ConvKernel& kernel, std::span<const double> y) {
  const auto g = geometry(kernel);
  const std::size_t plane = g.n * g.n;
  if (y.size() != g.c_out * plane)
    throw InvalidArgument("conv_apply_adjoint: input length " + std::to_string(y.size()) +
                          " != c_out * n^2 = " + std::to_string(g.c_out * plane));
  const long n = static_cast<long>(g.n);
  std::vector<double> x(g.c_in * plane, 0.0);
  // Correlation with the same filter, cropped to the grid.
  for (std::size_t o = 0; o < g.c_out; ++o)
    for (std::size_t i = 0; i < g.c_in; ++i) {
      const double* yo = y.data() + o * plane;
      double* xi = x.data() + i * plane;
      for (std::size_t a = 0; a < g.k; ++a)
        for (std::size_t b = 0; b < g.k; ++b) {
          const double w = kernel.filter(o, i, a, b);
          if (w == 0.0) continue;
          for (long r = 0; r < n; ++r) {
            const long dst_r = wrap(r + static_cast<long>(a) - g.offset, n, g.circular);
            if (dst_r < 0) continue;
            for (long c = 0; c < n; ++c) {
              const long dst_c = wrap(c + static_cast<long>(b) - g.offset, n, g.circular);
              if (dst_c < 0) continue;
              xi[r * n + c] += w * yo[dst_r * n + dst_c];
            }
          }
        }
    }
  return x;
}

ConvKernel adjoint_kernel(const ConvKernel& kernel) {
  kernel.validate();
  const std::size_t k = kernel.k();
  RealTensor4 flipped({kernel.c_in(), kernel.c_out(), k, k});
  for (std::size_t o = 0; o < kernel.c_out(); ++o)
    for (std::size_t i = 0; i < kernel.c_in(); ++i)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          flipped(i, o, k - 1 - a, k - 1 - b) = kernel.filter(o, i, a, b);
  ConvKernel out = kernel;
  out.filter = std::move(flipped);
  return out;
}

ConvKernel circular_shift(const ConvKernel& kernel, std::size_t dr, std::size_t dc) {
  kernel.validate();
  const std::size_t n = kernel.n();
  RealTensor4 shifted({kernel.c_out(), kernel.c_in(), n, n});
  for (std::size_t o = 0; o < kernel.c_out(); ++o)
    for (std::size_t i = 0; i < kernel.c_in(); ++i)
      for (std::size_t a = 0; a < kernel.k(); ++a)
        for (std::size_t b = 0; b < kernel.k(); ++b)
          shifted(o, i, (a + dr) % n, (b + dc) % n) = kernel.filter(o, i, a, b);
  ConvKernel out = kernel;
  out.filter = std::move(shifted);
  return out;
}

}  // namespace lip4
