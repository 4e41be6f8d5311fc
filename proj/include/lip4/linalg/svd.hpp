#pragma once

#include <vector>

#include "lip4/linalg/complex_matrix.hpp"

namespace lip4 {

/// Thin SVD a = left * diag(singular_values) * right^*, with min(p, q) columns in
/// both factors and singular values sorted non-increasing.
struct SvdResult {
  std::vector<double> singular_values;
  ComplexMatrix left_vectors;   // p x m
  ComplexMatrix right_vectors;  // q x m
};

struct SvdOptions {
  int max_sweeps = 100;
  /// A column pair counts as orthogonal once |a_i^* a_j| <= tolerance * |a_i| |a_j|.
  double tolerance = 1e-15;
  /// Skip left/right vectors when only singular values are needed.
  bool compute_vectors = true;
};

/// One-sided (Hestenes) Jacobi SVD. Throws NumericalError if the sweep cap is hit.
SvdResult svd(const ComplexMatrix& a, const SvdOptions& options = {});

/// Singular values only.
std::vector<double> singular_values(const ComplexMatrix& a);

/// Largest singular value via the Jacobi SVD.
double spectral_norm_exact(const ComplexMatrix& a);

}  // namespace lip4
