#include "lip4/conv/conv_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/linalg/fft.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"
#include "lip4/stopwatch.hpp"

namespace lip4 {

namespace {

void require_circular(const ConvKernel& kernel, const char* who) {
  kernel.validate_spectral();
  if (kernel.padding != Padding::circular)
    throw InvalidArgument(std::string(who) +
                          ": block diagonalization only describes circular padding");
}

std::pair<std::size_t, std::size_t> frequency(std::size_t index, std::size_t n) {
  return {index / n, index % n};
}

}  // namespace

std::string_view to_string(ConvMethod method) noexcept {
  switch (method) {
    case ConvMethod::gram_conv: return "gram";
    case ConvMethod::exact_svd_per_block: return "exact";
    case ConvMethod::conv_power_iteration: return "power";
    case ConvMethod::gram_conv_subsampled: return "gram-subsampled";
  }
  return "unknown";
}

BlockDiagSpectrum extract_blocks(const ConvKernel& kernel) {
  require_circular(kernel, "extract_blocks");
  const std::size_t n = kernel.n();
  const std::size_t k = kernel.k();
  BlockDiagSpectrum spectrum{n, std::vector<ComplexMatrix>(n * n, ComplexMatrix(kernel.c_out(), kernel.c_in()))};
  ComplexMatrix taps(k, k);
  for (std::size_t o = 0; o < kernel.c_out(); ++o)
    for (std::size_t i = 0; i < kernel.c_in(); ++i) {
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) taps(a, b) = kernel.filter(o, i, a, b);
      const ComplexMatrix freq = dft2_padded(taps, n, n);
      for (std::size_t f = 0; f < n * n; ++f) spectrum.blocks[f](o, i) = freq.data()[f];
    }
  return spectrum;
}

ConvBoundReport gram_conv(const ConvKernel& kernel, int n_iter) {
  if (n_iter < 1) throw InvalidArgument("gram_conv: n_iter must be >= 1");
  Stopwatch clock;
  auto spectrum = extract_blocks(kernel);

  // Blocks are independent; each keeps its own rescale accumulator.
  std::vector<ScaledGram> states;
  states.reserve(spectrum.blocks.size());
  for (auto& block : spectrum.blocks)
    states.emplace_back(block.cols() > block.rows() ? conj_transpose(block) : std::move(block));

  ConvBoundReport report;
  report.method = ConvMethod::gram_conv;
  std::size_t argmax = 0;
  for (int t = 1; t <= n_iter; ++t) {
    if (t > 1)
      for (auto& s : states) s.step();
    double best = -1.0;
    for (std::size_t f = 0; f < states.size(); ++f) {
      const double b = states[f].bound();
      if (b > best) {
        best = b;
        argmax = f;
      }
    }
    report.trace.push_back(best);
  }
  report.value = report.trace.back();
  report.argmax_block = frequency(argmax, spectrum.n);
  report.iterations = n_iter;
  report.elapsed_seconds = clock.seconds();
  return report;
}

ConvBoundReport exact_conv_spectrum(const ConvKernel& kernel) {
  Stopwatch clock;
  const auto spectrum = extract_blocks(kernel);
  ConvBoundReport report;
  report.method = ConvMethod::exact_svd_per_block;
  std::size_t argmax = 0;
  double best = -1.0;
  for (std::size_t f = 0; f < spectrum.blocks.size(); ++f) {
    const double s = spectral_norm_exact(spectrum.blocks[f]);
    if (s > best) {
      best = s;
      argmax = f;
    }
  }
  report.value = best;
  report.trace = {best};
  report.iterations = 1;
  report.argmax_block = frequency(argmax, spectrum.n);
  report.elapsed_seconds = clock.seconds();
  return report;
}

ConvBoundReport conv_power_iteration(const ConvKernel& kernel, int n_iter, std::uint64_t seed) {
  if (n_iter < 1) throw InvalidArgument("conv_power_iteration: n_iter must be >= 1");
  kernel.validate_spectral();
  Stopwatch clock;
  ConvBoundReport report;
  report.method = ConvMethod::conv_power_iteration;
  const auto filter = kernel.filter.data();
  if (std::all_of(filter.begin(), filter.end(), [](double x) { return x == 0.0; })) {
    report.elapsed_seconds = clock.seconds();
    return report;
  }

  auto norm = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };
  const std::size_t dim = kernel.c_in() * kernel.n() * kernel.n();
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal;
    std::vector<double> u(dim);
    for (auto& x : u) x = normal(rng);
    double nu = norm(u);
    for (auto& x : u) x /= nu;
    report.trace.clear();
    bool degenerate = false;
    for (int it = 0; it < n_iter; ++it) {
      auto v = conv_apply(kernel, u);
      const double nv = norm(v);
      if (nv == 0.0) {
        degenerate = true;
        break;
      }
      for (auto& x : v) x /= nv;
      u = conv_apply_adjoint(kernel, v);
      nu = norm(u);
      if (nu == 0.0) {
        degenerate = true;
        break;
      }
      for (auto& x : u) x /= nu;
      report.trace.push_back(nu);
    }
    if (!degenerate) {
      report.value = report.trace.back();
      report.iterations = n_iter;
      report.elapsed_seconds = clock.seconds();
      return report;
    }
  }
  throw NumericalError("conv_power_iteration: start vector collapsed to zero twice");
}

double subsampling_factor(std::size_t k, std::size_t n0, std::size_t n) noexcept {
  if (n0 >= n) return 1.0;
  return 1.0 + 2.0 * static_cast<double>(k / 2) / static_cast<double>(n0);
}

ConvBoundReport gram_conv_subsampled(const ConvKernel& kernel, std::size_t n0, int n_iter) {
  kernel.validate_spectral();
  if (n0 < kernel.k())
    throw InvalidArgument("gram_conv_subsampled: n0 = " + std::to_string(n0) +
                          " is smaller than k = " + std::to_string(kernel.k()));
  if (n0 > kernel.n())
    throw InvalidArgument("gram_conv_subsampled: n0 = " + std::to_string(n0) +
                          " exceeds n = " + std::to_string(kernel.n()));
  auto report = gram_conv(with_geometry(kernel, n0, kernel.padding), n_iter);
  const double factor = subsampling_factor(kernel.k(), n0, kernel.n());
  report.method = ConvMethod::gram_conv_subsampled;
  report.value *= factor;
  for (auto& x : report.trace) x *= factor;
  return report;
}

bool can_materialize(const ConvKernel& kernel) noexcept {
  const std::size_t plane = kernel.n() * kernel.n();
  return kernel.c_out() * plane <= materialize_limit && kernel.c_in() * plane <= materialize_limit;
}

ComplexMatrix materialize_conv_operator(const ConvKernel& kernel) {
  kernel.validate_spectral();
  if (!can_materialize(kernel))
    throw InvalidArgument("materialize_conv_operator: operator larger than " +
                          std::to_string(materialize_limit) + " per side");
  const std::size_t plane = kernel.n() * kernel.n();
  const std::size_t rows = kernel.c_out() * plane;
  const std::size_t cols = kernel.c_in() * plane;
  ComplexMatrix w(rows, cols);
  std::vector<double> impulse(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    impulse[j] = 1.0;
    const auto column = conv_apply(kernel, impulse);
    impulse[j] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) w(r, j) = column[r];
  }
  return w;
}

}  // namespace lip4
