#include "lip4/dense/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lip4/error.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"
#include "lip4/stopwatch.hpp"

namespace lip4 {

namespace {

void require_iterations(int n_iter, const char* who) {
  if (n_iter < 1) throw InvalidArgument(std::string(who) + ": n_iter must be >= 1");
}

bool is_zero(const ComplexMatrix& g) noexcept { return frobenius_norm(g) == 0.0; }

// Gram products on the smaller side: G G* and G* G share their nonzero spectrum.
ComplexMatrix narrow_side(const ComplexMatrix& g) {
  return g.cols() > g.rows() ? conj_transpose(g) : g;
}

}  // namespace

std::string_view to_string(DenseMethod method) noexcept {
  switch (method) {
    case DenseMethod::power_iteration: return "power";
    case DenseMethod::gram_naive: return "gram-naive";
    case DenseMethod::gram_rescaled: return "gram";
    case DenseMethod::svd_exact: return "svd";
    case DenseMethod::gram_eigen: return "eigen";
  }
  return "unknown";
}

DenseMethod parse_dense_method(std::string_view name) {
  for (auto m : {DenseMethod::power_iteration, DenseMethod::gram_naive, DenseMethod::gram_rescaled,
                 DenseMethod::svd_exact, DenseMethod::gram_eigen})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown dense method '" + std::string(name) +
                        "' (expected power, gram-naive, gram, svd or eigen)");
}

ScaledGram::ScaledGram(ComplexMatrix g, Mode mode) : iterate_(std::move(g)), mode_(mode) {
  if (mode_ == Mode::squaring && iterate_.rows() != iterate_.cols())
    throw InvalidArgument("squaring iteration needs a square matrix, got " +
                          iterate_.shape_string());
  norm_ = frobenius_norm(iterate_);
  bound_ = norm_;
}

void ScaledGram::step() {
  const double norm = norm_;
  if (norm == 0.0) {
    ++t_;
    return;
  }
  if (norm >= std::numeric_limits<double>::min()) {
    const double inv = 1.0 / norm;
    for (auto& z : iterate_.data()) z *= inv;
  } else {
    for (auto& z : iterate_.data()) z /= norm;  // 1 / norm would overflow
  }
  iterate_ = mode_ == Mode::gram ? gram(iterate_) : matmul(iterate_, iterate_);
  log_scale_ = 2.0 * (log_scale_ + std::log(norm));
  // bound_{t+1} = bound_t * ||A A'||_F^(2^-t) with ||A||_F = 1, and ||A A'||_F <= 1.
  // Anything above 1 is rounding.
  norm_ = frobenius_norm(iterate_);
  bound_ *= std::pow(std::min(norm_, 1.0), std::ldexp(1.0, -t_));
  ++t_;
}

EstimateReport power_iteration(const ComplexMatrix& g, int n_iter, std::uint64_t seed) {
  require_iterations(n_iter, "power_iteration");
  Stopwatch clock;
  EstimateReport report;
  report.method = DenseMethod::power_iteration;
  if (is_zero(g)) {
    report.elapsed_seconds = clock.seconds();
    return report;
  }

  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    auto u = gaussian_unit_vector(g.cols(), rng);
    report.trace.clear();
    bool degenerate = false;
    for (int it = 0; it < n_iter; ++it) {
      auto v = apply(g, u);
      const double nv = vector_norm(v);
      if (nv == 0.0) {
        degenerate = true;
        break;
      }
      for (auto& z : v) z /= nv;
      u = apply_adjoint(g, v);
      const double nu = vector_norm(u);
      if (nu == 0.0) {
        degenerate = true;
        break;
      }
      for (auto& z : u) z /= nu;
      // (G u)^* v = u^* G^* v = ||G^* v|| for the freshly normalized u.
      report.trace.push_back(nu);
    }
    if (!degenerate) {
      report.value = report.trace.back();
      report.iterations = n_iter;
      report.elapsed_seconds = clock.seconds();
      return report;
    }
  }
  throw NumericalError("power_iteration: start vector collapsed to zero twice (seed " +
                       std::to_string(seed) + ")");
}

EstimateReport gram_naive(const ComplexMatrix& g, int n_iter) {
  require_iterations(n_iter, "gram_naive");
  Stopwatch clock;
  EstimateReport report;
  report.method = DenseMethod::gram_naive;
  ComplexMatrix iterate = narrow_side(g);
  for (int t = 1; t <= n_iter; ++t) {
    if (t > 1) iterate = gram(iterate);
    double squared = 0.0;
    for (const auto& z : iterate.data()) squared += std::norm(z);
    if (!iterate.all_finite() || !std::isfinite(squared))
      throw NumericalError("gram_naive: overflow at iteration " + std::to_string(t) +
                           "; use gram_rescaled");
    report.trace.push_back(std::pow(squared, std::ldexp(1.0, -t)));
  }
  report.value = report.trace.back();
  report.iterations = n_iter;
  report.elapsed_seconds = clock.seconds();
  return report;
}

EstimateReport gram_rescaled(const ComplexMatrix& g, int n_iter) {
  require_iterations(n_iter, "gram_rescaled");
  Stopwatch clock;
  EstimateReport report;
  report.method = DenseMethod::gram_rescaled;
  if (is_zero(g)) {
    report.elapsed_seconds = clock.seconds();
    return report;
  }
  ScaledGram state(narrow_side(g));
  report.trace.push_back(state.bound());
  while (state.t() < n_iter) {
    state.step();
    report.trace.push_back(state.bound());
  }
  report.value = report.trace.back();
  report.iterations = n_iter;
  report.elapsed_seconds = clock.seconds();
  return report;
}

EstimateReport svd_exact(const ComplexMatrix& g) {
  Stopwatch clock;
  EstimateReport report;
  report.method = DenseMethod::svd_exact;
  report.value = spectral_norm_exact(g);
  report.trace = {report.value};
  report.iterations = 1;
  report.elapsed_seconds = clock.seconds();
  return report;
}

EstimateReport gram_eigen(const ComplexMatrix& g, int n_iter) {
  require_iterations(n_iter, "gram_eigen");
  Stopwatch clock;
  EstimateReport report;
  report.method = DenseMethod::gram_eigen;
  ScaledGram state(g, ScaledGram::Mode::squaring);
  if (is_zero(g)) {
    report.elapsed_seconds = clock.seconds();
    return report;
  }
  report.trace.push_back(state.bound());
  while (state.t() < n_iter) {
    state.step();
    report.trace.push_back(state.bound());
  }
  report.value = report.trace.back();
  report.iterations = n_iter;
  report.elapsed_seconds = clock.seconds();
  return report;
}

EstimateReport estimate(DenseMethod method, const ComplexMatrix& g, int n_iter,
                        std::uint64_t seed) {
  switch (method) {
    case DenseMethod::power_iteration: return power_iteration(g, n_iter, seed);
    case DenseMethod::gram_naive: return gram_naive(g, n_iter);
    case DenseMethod::gram_rescaled: return gram_rescaled(g, n_iter);
    case DenseMethod::svd_exact: return svd_exact(g);
    case DenseMethod::gram_eigen: return gram_eigen(g, n_iter);
  }
  throw InvalidArgument("unknown dense method");
}

ComplexMatrix gram_bound_gradient(const ComplexMatrix& g, int t) {
  require_iterations(t, "gram_bound_gradient");
  const double scale = gram_rescaled(g, t).value;
  if (scale == 0.0) throw NumericalError("gram_bound_gradient: bound is not differentiable at 0");
  ComplexMatrix h = g;
  for (auto& z : h.data()) z /= scale;
  if (t == 1) {
    const double norm = frobenius_norm(h);
    for (auto& z : h.data()) z /= norm;
    return h;
  }

  // power = H^(2^k) for k = 0..t-2 with H = h* h; their product is H^(2^(t-1)-1).
  ComplexMatrix power = gram(h);
  ComplexMatrix product = power;
  for (int k = 1; k <= t - 2; ++k) {
    power = gram(power);
    product = matmul(product, power);
  }
  // power is now h^(t) = H^(2^(t-2)).
  const double denom = std::pow(frobenius_norm(power), 2.0 * (1.0 - std::ldexp(1.0, -t)));
  ComplexMatrix grad = matmul(h, product);
  for (auto& z : grad.data()) z /= denom;
  return grad;
}

SingularTriplet singular_vectors(const ComplexMatrix& g, int n_iter) {
  if (n_iter < 2) throw InvalidArgument("singular_vectors: n_iter must be >= 2");
  if (is_zero(g)) throw NumericalError("singular_vectors: zero matrix");
  ScaledGram state(g);
  while (state.t() < n_iter) state.step();

  const ComplexMatrix& p = state.iterate();
  std::size_t best = 0;
  double best_norm = 0.0;
  for (std::size_t c = 0; c < p.cols(); ++c) {
    const double nc = vector_norm(p.column(c));
    if (nc > best_norm) {
      best_norm = nc;
      best = c;
    }
  }
  if (!(best_norm > 0.0) || !std::isfinite(best_norm))
    throw NumericalError("singular_vectors: final Gram iterate has no usable column");

  SingularTriplet out;
  out.right = p.column(best);
  for (auto& z : out.right) z /= best_norm;
  out.left = apply(g, out.right);
  out.sigma = vector_norm(out.left);
  if (out.sigma == 0.0) throw NumericalError("singular_vectors: recovered vector is in the kernel");
  for (auto& z : out.left) z /= out.sigma;
  return out;
}

}  // namespace lip4
