#pragma once

// Dense complex linear algebra for small matrices (dimension up to a few dozen):
// Hermitian eigendecomposition by cyclic Jacobi, exponential and principal
// logarithm of unitaries, frame overlaps and polar alignment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "geophase/error.hpp"

namespace geophase {

using Complex = std::complex<double>;
using Ket = std::vector<Complex>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr Complex I_unit{0.0, 1.0};

/// Reduce an angle to [0, 2*pi).
inline double wrap_phase(double angle) {
  double r = std::fmod(angle, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r -= two_pi;
  return r;
}

/// Shortest distance between two angles on the circle, in [0, pi].
inline double phase_distance(double a, double b) {
  const double d = wrap_phase(a - b);
  return std::min(d, two_pi - d);
}

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> row_major)
      : rows_(rows), cols_(cols), data_(row_major) {
    if (data_.size() != rows * cols)
      throw Error(ErrorKind::dimension_mismatch, "initializer size does not match matrix shape");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix from_columns(const std::vector<Ket>& columns) {
    if (columns.empty()) return {};
    ComplexMatrix m(columns.front().size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != m.rows_)
        throw Error(ErrorKind::dimension_mismatch, "columns of unequal length");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<Complex>& data() const noexcept { return data_; }

  Ket column(std::size_t j) const {
    Ket v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_column(std::size_t j, const Ket& v) {
    if (v.size() != rows_) throw Error(ErrorKind::dimension_mismatch, "column length");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  /// Columns [first, first + count).
  ComplexMatrix columns(std::size_t first, std::size_t count) const {
    ComplexMatrix m(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
    return m;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s); }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= Complex(-1.0); }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_)
      throw Error(ErrorKind::dimension_mismatch, "matrix product of incompatible shapes");
    ComplexMatrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }

  friend Ket operator*(const ComplexMatrix& a, const Ket& v) {
    if (a.cols_ != v.size()) throw Error(ErrorKind::dimension_mismatch, "matrix-vector product");
    Ket out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * v[k];
      out[i] = s;
    }
    return out;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorKind::dimension_mismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// ---- ket helpers --------------------------------------------------------

inline Complex inner(const Ket& a, const Ket& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension_mismatch, "inner product of kets");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm(const Ket& a) { return std::sqrt(std::max(0.0, inner(a, a).real())); }

inline Ket scaled(Ket a, Complex s) {
  for (auto& x : a) x *= s;
  return a;
}

inline Ket normalized(const Ket& a) {
  const double n = norm(a);
  if (n == 0.0) throw Error(ErrorKind::not_normalized, "cannot normalize the zero ket");
  return scaled(a, 1.0 / n);
}

inline double distance(const Ket& a, const Ket& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension_mismatch, "ket distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

/// <a|M|b>
inline Complex expectation(const Ket& a, const ComplexMatrix& m, const Ket& b) { return inner(a, m * b); }

// ---- matrix measures ----------------------------------------------------

inline double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

inline bool all_finite(const ComplexMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](Complex x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

/// ||M - M^dagger||_F
inline double hermiticity_defect(const ComplexMatrix& m) { return frobenius_norm(m - m.adjoint()); }

/// ||M + M^dagger||_F
inline double skew_hermiticity_defect(const ComplexMatrix& m) { return frobenius_norm(m + m.adjoint()); }

/// ||U^dagger U - I||_F
inline double unitarity_defect(const ComplexMatrix& u) {
  return frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(u.cols()));
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }
inline ComplexMatrix skew_hermitian_part(const ComplexMatrix& m) { return 0.5 * (m - m.adjoint()); }

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

inline ComplexMatrix pauli_x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
inline ComplexMatrix pauli_y() { return ComplexMatrix(2, 2, {0.0, -I_unit, I_unit, 0.0}); }
inline ComplexMatrix pauli_z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }

/// Block-diagonal assembly of square blocks.
inline ComplexMatrix block_diagonal(const std::vector<ComplexMatrix>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (!b.is_square()) throw Error(ErrorKind::dimension_mismatch, "block_diagonal needs square blocks");
    n += b.rows();
  }
  ComplexMatrix m(n, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) m(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return m;
}

inline constexpr double hermitian_tolerance = 1e-12;
inline constexpr double unitary_tolerance = 1e-10;
inline constexpr double frame_tolerance = 1e-10;

/// Ordered orthonormal N-tuple of kets in a K-dimensional space, stored as a K x N block.
class Frame {
 public:
  Frame() = default;

  explicit Frame(ComplexMatrix columns, double tolerance = frame_tolerance) : columns_(std::move(columns)) {
    if (columns_.cols() == 0 || columns_.cols() > columns_.rows())
      throw Error(ErrorKind::invalid_frame, "frame must satisfy 1 <= N <= K");
    const double defect = unitarity_defect(columns_);
    if (!(defect <= tolerance)) {
      std::ostringstream os;
      os << "columns not orthonormal, ||F^dagger F - I||_F = " << defect;
      throw Error(ErrorKind::invalid_frame, os.str());
    }
  }

  static Frame from_ket(const Ket& v, double tolerance = frame_tolerance) {
    return Frame(ComplexMatrix::from_columns({v}), tolerance);
  }

  std::size_t dim() const noexcept { return columns_.rows(); }
  std::size_t count() const noexcept { return columns_.cols(); }
  const ComplexMatrix& matrix() const noexcept { return columns_; }
  Ket column(std::size_t j) const { return columns_.column(j); }

  /// Projector F F^dagger onto the spanned subspace.
  ComplexMatrix projector() const { return columns_ * columns_.adjoint(); }

 private:
  ComplexMatrix columns_;
};

namespace linalg {

namespace detail {

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (!m.is_square() || m.rows() == 0) throw Error(ErrorKind::dimension_mismatch, std::string(what) + " needs a non-empty square matrix");
}

inline void require_hermitian(const ComplexMatrix& h, const char* what) {
  require_square(h, what);
  if (!all_finite(h)) throw Error(ErrorKind::symmetry_violation, std::string(what) + ": non-finite entries");
  const double defect = hermiticity_defect(h);
  if (defect > hermitian_tolerance * frobenius_norm(h)) {
    std::ostringstream os;
    os << what << ": input is not Hermitian, ||H - H^dagger||_F = " << defect << " exceeds "
       << hermitian_tolerance << " * ||H||_F";
    throw Error(ErrorKind::symmetry_violation, os.str());
  }
}

// One complex Jacobi rotation annihilating a(p, q). The rotation is
// G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] restricted to (p, q).
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{i phi}
  const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * std::conj(phase);
  const Complex gqq = c * std::conj(phase);

  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    const Complex arp = a(r, p);
    const Complex arq = a(r, q);
    a(r, p) = arp * gpp + arq * gqp;
    a(r, q) = arp * gpq + arq * gqq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const Complex apr = a(p, r);
    const Complex aqr = a(q, r);
    a(p, r) = std::conj(gpp) * apr + std::conj(gqp) * aqr;
    a(q, r) = std::conj(gpq) * apr + std::conj(gqq) * aqr;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t r = 0; r < n; ++r) {
    const Complex vrp = v(r, p);
    const Complex vrq = v(r, q);
    v(r, p) = vrp * gpp + vrq * gqp;
    v(r, q) = vrp * gpq + vrq * gqq;
  }
}

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Largest-magnitude component made real-positive; ties resolved toward the lowest index.
inline void fix_column_phase(ComplexMatrix& v, std::size_t j) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) best = std::max(best, std::abs(v(i, j)));
  if (best == 0.0) return;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, j)) >= best * (1.0 - 1e-9)) {
      const Complex rot = std::conj(v(i, j)) / std::abs(v(i, j));
      for (std::size_t r = 0; r < v.rows(); ++r) v(r, j) *= rot;
      v(i, j) = std::abs(v(i, j));
      return;
    }
  }
}

}  // namespace detail

struct EigenSystem {
  std::vector<double> values;  // ascending
  Frame vectors;               // column k pairs with values[k]
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
inline EigenSystem eigh(const ComplexMatrix& h) {
  detail::require_hermitian(h, "eigh");
  const std::size_t n = h.rows();
  ComplexMatrix a = hermitian_part(h);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = frobenius_norm(a);

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (detail::off_diagonal_norm(a) <= 1e-17 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem out;
  out.values.resize(n);
  ComplexMatrix sorted(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) sorted(r, k) = v(r, order[k]);
    detail::fix_column_phase(sorted, k);
  }
  out.vectors = Frame(std::move(sorted));
  return out;
}

inline constexpr double default_degeneracy_tolerance = 1e-8;

/// Partition ascending eigenvalues into runs of near-equal values.
inline std::vector<std::vector<std::size_t>> group_degenerate(const std::vector<double>& values,
                                                              double rel_tol = default_degeneracy_tolerance) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && std::abs(values[i] - values[i - 1]) <= rel_tol * std::max(1.0, std::abs(values[i - 1])))
      groups.back().push_back(i);
    else
      groups.push_back({i});
  }
  return groups;
}

/// exp(A) for skew-Hermitian A, through the eigendecomposition of the Hermitian -iA.
inline ComplexMatrix unitary_exp(const ComplexMatrix& a) {
  detail::require_square(a, "unitary_exp");
  const double defect = skew_hermiticity_defect(a);
  if (!all_finite(a) || defect > 1e-10 * frobenius_norm(a)) {
    std::ostringstream os;
    os << "unitary_exp: input is not skew-Hermitian, ||A + A^dagger||_F = " << defect;
    throw Error(ErrorKind::symmetry_violation, os.str());
  }
  const ComplexMatrix k = hermitian_part(Complex(0.0, -1.0) * a);
  const EigenSystem es = eigh(k);
  std::vector<Complex> d(es.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::polar(1.0, es.values[i]);
  const ComplexMatrix& v = es.vectors.matrix();
  return v * ComplexMatrix::diagonal(d) * v.adjoint();
}

/// exp(-i H dt) for Hermitian H.
inline ComplexMatrix propagator(const ComplexMatrix& h, double dt) {
  detail::require_hermitian(h, "propagator");
  const EigenSystem es = eigh(h);
  std::vector<Complex> d(es.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::polar(1.0, -es.values[i] * dt);
  const ComplexMatrix& v = es.vectors.matrix();
  return v * ComplexMatrix::diagonal(d) * v.adjoint();
}

struct UnitaryEigen {
  std::vector<Complex> values;  // unit-modulus eigenvalues
  ComplexMatrix vectors;        // unitary, column k pairs with values[k]
};

/// Eigendecomposition of a unitary (normal) matrix. The commuting Hermitian
/// parts (U + U^dagger)/2 and (U - U^dagger)/2i are diagonalized jointly.
inline UnitaryEigen unitary_eigen(const ComplexMatrix& u) {
  detail::require_square(u, "unitary_eigen");
  const double defect = unitarity_defect(u);
  if (!(defect <= 1e-8)) {
    std::ostringstream os;
    os << "unitary_eigen: input is not unitary, ||U^dagger U - I||_F = " << defect;
    throw Error(ErrorKind::symmetry_violation, os.str());
  }
  const std::size_t n = u.rows();
  const ComplexMatrix c = hermitian_part(u);
  const ComplexMatrix s = hermitian_part(Complex(0.0, -0.5) * (u - u.adjoint()));
  const EigenSystem ec = eigh(c);
  ComplexMatrix v = ec.vectors.matrix();

  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && ec.values[end] - ec.values[end - 1] <= 1e-6) ++end;
    if (end - start > 1) {
      const ComplexMatrix block = v.columns(start, end - start);
      const EigenSystem es = eigh(hermitian_part(block.adjoint() * s * block));
      const ComplexMatrix rotated = block * es.vectors.matrix();
      for (std::size_t j = 0; j < end - start; ++j) v.set_column(start + j, rotated.column(j));
    }
    start = end;
  }

  UnitaryEigen out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Ket col = v.column(k);
    const Complex lambda = expectation(col, u, col);
    out.values[k] = lambda / std::abs(lambda);
  }
  out.vectors = std::move(v);
  return out;
}

/// Eigenvalue phases of a unitary, each in [0, 2*pi), ascending.
inline std::vector<double> unitary_eigenphases(const ComplexMatrix& u) {
  const UnitaryEigen ue = unitary_eigen(u);
  std::vector<double> phases;
  phases.reserve(ue.values.size());
  for (const Complex& z : ue.values) phases.push_back(wrap_phase(std::arg(z)));
  std::sort(phases.begin(), phases.end());
  return phases;
}

/// Largest circular distance between two spectra of phases, minimized over the
/// cyclic alignments of the sorted lists (optimal matching of points on a circle).
inline double spectrum_distance(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension_mismatch, "spectra of different sizes");
  if (a.empty()) return 0.0;
  for (auto& x : a) x = wrap_phase(x);
  for (auto& x : b) x = wrap_phase(x);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double best = pi;
  for (std::size_t shift = 0; shift < b.size(); ++shift) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, phase_distance(a[i], b[(i + shift) % b.size()]));
    best = std::min(best, worst);
  }
  return best;
}

enum class BranchPolicy { reject, permit };

inline constexpr double branch_cut_margin = 1e-6;

/// Principal logarithm of a unitary; eigenvalue phases land in (-pi, pi].
inline ComplexMatrix matrix_log_unitary(const ComplexMatrix& u, BranchPolicy policy = BranchPolicy::reject) {
  const UnitaryEigen ue = unitary_eigen(u);
  std::vector<Complex> d(ue.values.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    double alpha = std::arg(ue.values[k]);
    if (pi - std::abs(alpha) < branch_cut_margin) {
      if (policy == BranchPolicy::reject) {
        std::ostringstream os;
        os << "eigenvalue " << ue.values[k] << " lies within " << branch_cut_margin
           << " of the branch cut at e^{i pi}";
        throw Error(ErrorKind::branch_ambiguity, os.str());
      }
      alpha = pi;
    }
    d[k] = Complex(0.0, alpha);
  }
  const ComplexMatrix& v = ue.vectors;
  return skew_hermitian_part(v * ComplexMatrix::diagonal(d) * v.adjoint());
}

/// N x N block of inner products <f_r|g_s>.
inline ComplexMatrix overlap_matrix(const Frame& f, const Frame& g) {
  if (f.dim() != g.dim() || f.count() != g.count())
    throw Error(ErrorKind::dimension_mismatch, "overlap_matrix needs frames of equal shape");
  return f.matrix().adjoint() * g.matrix();
}

/// Smallest singular value of a square matrix.
inline double smallest_singular_value(const ComplexMatrix& m) {
  detail::require_square(m, "smallest_singular_value");
  const EigenSystem es = eigh(hermitian_part(m.adjoint() * m));
  return std::sqrt(std::max(0.0, es.values.front()));
}

inline constexpr double singular_threshold = 1e-12;

/// Unitary factor U of the polar decomposition M = U P, i.e. the unitary
/// closest to M in Frobenius norm.
inline ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  detail::require_square(m, "polar_unitary");
  const EigenSystem es = eigh(hermitian_part(m.adjoint() * m));
  const double smallest = std::sqrt(std::max(0.0, es.values.front()));
  if (!(smallest > singular_threshold)) {
    std::ostringstream os;
    os << "polar_unitary: smallest singular value " << smallest << " <= " << singular_threshold;
    throw Error(ErrorKind::rank_deficiency, os.str());
  }
  std::vector<Complex> d(es.values.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = 1.0 / std::sqrt(es.values[k]);
  const ComplexMatrix& v = es.vectors.matrix();
  return m * (v * ComplexMatrix::diagonal(d) * v.adjoint());
}

}  // namespace linalg
}  // namespace geophase
