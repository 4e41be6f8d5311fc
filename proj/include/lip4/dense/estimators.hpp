#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lip4/linalg/complex_matrix.hpp"

namespace lip4 {

enum class DenseMethod { power_iteration, gram_naive, gram_rescaled, svd_exact, gram_eigen };

/// Command-line names: power, gram-naive, gram, svd, eigen.
std::string_view to_string(DenseMethod method) noexcept;
DenseMethod parse_dense_method(std::string_view name);

struct EstimateReport {
  DenseMethod method = DenseMethod::gram_rescaled;
  double value = 0.0;
  /// One entry per iteration; value == trace.back() when non-empty.
  std::vector<double> trace;
  int iterations = 0;
  double elapsed_seconds = 0.0;
};

/// A Gram iterate kept in floating-point range by Frobenius rescaling.
///
/// At step t the unscaled iterate G^(t) equals iterate() * exp(log_scale()), where
/// G^(1) = G and G^(t+1) = G^(t)* G^(t) (or G^(t) G^(t) in squaring mode).
/// bound() returns ||G^(t)||_F^(2^(1-t)), the Schatten-2^t norm of G, which is an
/// upper bound on the spectral norm for every t.
class ScaledGram {
 public:
  enum class Mode { gram, squaring };

  explicit ScaledGram(ComplexMatrix g, Mode mode = Mode::gram);

  /// Rescale by the current Frobenius norm, multiply, and fold the norm into log_scale.
  void step();

  /// ||G^(t)||_F^(2^(1-t)) exp(2^(1-t) log_scale), accumulated as a running product
  /// so the sequence never increases in floating point.
  [[nodiscard]] double bound() const noexcept { return bound_; }
  [[nodiscard]] int t() const noexcept { return t_; }
  [[nodiscard]] const ComplexMatrix& iterate() const noexcept { return iterate_; }
  [[nodiscard]] double log_scale() const noexcept { return log_scale_; }

 private:
  ComplexMatrix iterate_;
  double log_scale_ = 0.0;
  double norm_ = 0.0;  // Frobenius norm of iterate_
  double bound_ = 0.0;
  int t_ = 1;
  Mode mode_;
};

/// Alternating power iteration on G and G*, started from a seeded Gaussian vector.
/// The trace holds the estimate (G u)^* v after each (v, u) update.
EstimateReport power_iteration(const ComplexMatrix& g, int n_iter, std::uint64_t seed);

/// Gram iteration without rescaling. Throws NumericalError once an iterate
/// (or its squared Frobenius norm) leaves the double range.
EstimateReport gram_naive(const ComplexMatrix& g, int n_iter);

/// Gram iteration with rescaling; value is the Schatten-2^n_iter norm of g.
EstimateReport gram_rescaled(const ComplexMatrix& g, int n_iter);

/// Exact spectral norm from the Jacobi SVD.
EstimateReport svd_exact(const ComplexMatrix& g);

/// Squaring variant (G <- G G) for square g; upper-bounds the spectral radius.
EstimateReport gram_eigen(const ComplexMatrix& g, int n_iter);

/// Dispatches on `method`. `seed` is used only by power iteration.
EstimateReport estimate(DenseMethod method, const ComplexMatrix& g, int n_iter,
                        std::uint64_t seed = 0);

/// Gradient of ||G^(t)||_F^(2^(1-t)) with respect to G:
///   G (G*G)^(2^(t-1)-1) / ||G^(t)||_F^(2(1-2^-t)).
/// For complex entries this is d/dRe + i d/dIm. The input is first divided by its
/// Schatten bound; the formula is invariant under positive scaling so nothing
/// needs to be undone afterwards.
ComplexMatrix gram_bound_gradient(const ComplexMatrix& g, int t);

struct SingularTriplet {
  std::vector<Complex> right;  // u, length cols
  std::vector<Complex> left;   // v, length rows
  double sigma = 0.0;
};

/// Top singular triplet from the converged Gram iterate. Requires n_iter >= 2 and a
/// simple top singular value.
SingularTriplet singular_vectors(const ComplexMatrix& g, int n_iter);

}  // namespace lip4
