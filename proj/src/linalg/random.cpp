#include "lip4/linalg/random.hpp"

namespace lip4 {

ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              bool complex_entries) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> entries(rows * cols);
  for (auto& z : entries) {
    const double re = normal(rng);
    z = complex_entries ? Complex(re, normal(rng)) : Complex(re, 0.0);
  }
  return {rows, cols, std::move(entries)};
}

std::vector<Complex> gaussian_unit_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<Complex> v(n);
  for (auto& z : v) z = normal(rng);
  const double nv = vector_norm(v);
  if (nv > 0.0)
    for (auto& z : v) z /= nv;
  return v;
}

RealTensor4 gaussian_filter(std::size_t c_out, std::size_t c_in, std::size_t k,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> entries(c_out * c_in * k * k);
  for (auto& x : entries) x = normal(rng);
  return {{c_out, c_in, k, k}, std::move(entries)};
}

}  // namespace lip4
