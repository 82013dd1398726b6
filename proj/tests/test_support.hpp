#pragma once

// Test-only helpers: random generators and reference algorithms that are
// independent of the library's eigendecomposition route.

#include <cmath>
#include <random>

#include "geophase/linalg.hpp"

namespace geophase::fixtures {

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  return hermitian_part(random_matrix(n, rng, scale));
}

/// exp(A) by scaling and squaring of a truncated Taylor series.
inline ComplexMatrix taylor_expm(const ComplexMatrix& a) {
  const double nrm = frobenius_norm(a);
  int squarings = 0;
  double scale = 1.0;
  while (nrm * scale > 0.125) {
    scale *= 0.5;
    ++squarings;
  }
  const ComplexMatrix x = a * Complex(scale);
  ComplexMatrix term = ComplexMatrix::identity(a.rows());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x * Complex(1.0 / k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Haar-ish random unitary via the Taylor exponential of a random anti-Hermitian matrix.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  return taylor_expm(Complex(0.0, 1.0) * random_hermitian(n, rng, scale));
}

/// Orthonormalize the first `count` columns of a random matrix by modified Gram-Schmidt.
inline Frame random_frame(std::size_t dim, std::size_t count, std::mt19937_64& rng) {
  const ComplexMatrix m = random_matrix(dim, rng);
  std::vector<Ket> cols;
  for (std::size_t j = 0; j < count; ++j) {
    Ket v = m.column(j);
    for (const Ket& u : cols) {
      const Complex c = inner(u, v);
      for (std::size_t i = 0; i < dim; ++i) v[i] -= c * u[i];
    }
    cols.push_back(normalized(v));
  }
  return Frame(ComplexMatrix::from_columns(cols));
}

}  // namespace geophase::fixtures
