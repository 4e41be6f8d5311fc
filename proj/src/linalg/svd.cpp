#include "lip4/linalg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lip4/error.hpp"

namespace lip4 {

namespace {

// Column-major working copy: column j occupies [j*rows, (j+1)*rows).
struct Columns {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  Complex* col(std::size_t j) noexcept { return data.data() + j * rows; }
  const Complex* col(std::size_t j) const noexcept { return data.data() + j * rows; }
};

Columns to_columns(const ComplexMatrix& a, bool adjoint) {
  Columns w;
  w.rows = adjoint ? a.cols() : a.rows();
  w.cols = adjoint ? a.rows() : a.cols();
  w.data.resize(w.rows * w.cols);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (adjoint)
        w.col(r)[c] = std::conj(a(r, c));
      else
        w.col(c)[r] = a(r, c);
    }
  return w;
}

double squared_norm(const Complex* x, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

// [x, y] <- [x, y] * diag(1, phase) * [[c, s], [-s, c]]
void rotate(Complex* x, Complex* y, std::size_t n, double c, double s, Complex phase) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const Complex xi = x[i];
    const Complex yi = phase * y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Completes the columns of q whose norms are zero so that all columns are orthonormal.
void complete_basis(ComplexMatrix& q, const std::vector<bool>& valid) {
  const std::size_t n = q.rows();
  std::size_t next_basis = 0;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    if (valid[j]) continue;
    while (next_basis < n) {
      std::vector<Complex> v(n);
      v[next_basis++] = 1.0;
      // Two passes of Gram-Schmidt against every already-filled column.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < q.cols(); ++k) {
          if (k == j || (!valid[k] && k > j)) continue;
          Complex proj{};
          for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * v[i];
          for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, k);
        }
      const double nv = vector_norm(v);
      if (nv > 1e-8) {
        for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const ComplexMatrix& a, const SvdOptions& options) {
  // Orthogonalize the columns of a (or of a^* when a is wide) so the rotated
  // dimension is min(p, q).
  const bool wide = a.cols() > a.rows();
  Columns w = to_columns(a, wide);
  const std::size_t m = w.cols;
  const std::size_t len = w.rows;

  Columns v;
  if (options.compute_vectors) {
    v.rows = m;
    v.cols = m;
    v.data.assign(m * m, Complex{});
    for (std::size_t j = 0; j < m; ++j) v.col(j)[j] = 1.0;
  }

  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = squared_norm(w.col(j), len);
  const double total = std::accumulate(norms.begin(), norms.end(), 0.0);
  // Columns below this are numerically zero relative to the whole matrix.
  const double negligible = total * 1e-32;
  const double tol =
      std::max(options.tolerance,
               std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(len)));

  bool converged = m < 2 || total == 0.0;
  double worst = 0.0;
  int sweep = 0;
  for (; !converged && sweep < options.max_sweeps; ++sweep) {
    worst = 0.0;
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double alpha = norms[i];
        const double beta = norms[j];
        if (alpha <= negligible || beta <= negligible) continue;
        Complex gamma{};
        const Complex* ci = w.col(i);
        const Complex* cj = w.col(j);
        for (std::size_t k = 0; k < len; ++k) gamma += std::conj(ci[k]) * cj[k];
        const double g = std::abs(gamma);
        const double rel = g / std::sqrt(alpha * beta);
        worst = std::max(worst, rel);
        if (rel <= tol) continue;
        rotated = true;
        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate(w.col(i), w.col(j), len, c, s, phase);
        if (options.compute_vectors) rotate(v.col(i), v.col(j), m, c, s, phase);
        norms[i] = squared_norm(w.col(i), len);
        norms[j] = squared_norm(w.col(j), len);
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "svd: no convergence after " << options.max_sweeps
        << " sweeps (largest relative off-diagonal " << worst << ")";
    throw NumericalError(msg.str());
  }

  std::vector<double> sigma(m);
  for (std::size_t j = 0; j < m; ++j) sigma[j] = std::sqrt(squared_norm(w.col(j), len));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult result;
  result.singular_values.resize(m);
  for (std::size_t k = 0; k < m; ++k) result.singular_values[k] = sigma[order[k]];
  if (!options.compute_vectors) return result;

  // Rotated columns are U * Sigma; the accumulated rotations are the other factor.
  ComplexMatrix u(len, m);
  ComplexMatrix right(m, m);
  std::vector<bool> valid(m, false);
  const double floor = std::sqrt(total) * 1e-15;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = order[k];
    if (sigma[j] > floor) {
      valid[k] = true;
      for (std::size_t i = 0; i < len; ++i) u(i, k) = w.col(j)[i] / sigma[j];
    }
    for (std::size_t i = 0; i < m; ++i) right(i, k) = v.col(j)[i];
  }
  complete_basis(u, valid);

  // For wide inputs we decomposed a^* = u S right^*, so a = right S u^*.
  if (wide) {
    result.left_vectors = std::move(right);
    result.right_vectors = std::move(u);
  } else {
    result.left_vectors = std::move(u);
    result.right_vectors = std::move(right);
  }
  return result;
}

std::vector<double> singular_values(const ComplexMatrix& a) {
  SvdOptions options;
  options.compute_vectors = false;
  return svd(a, options).singular_values;
}

double spectral_norm_exact(const ComplexMatrix& a) {
  const auto s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

}  // namespace lip4
