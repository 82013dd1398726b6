#include <gtest/gtest.h>

#include <random>

#include "geophase/linalg.hpp"
#include "test_support.hpp"

using namespace geophase;
using geophase::fixtures::max_abs_diff;

namespace {

ComplexMatrix bloch(double theta, double phi) {
  return std::sin(2 * theta) * std::cos(phi) * pauli_x() + std::sin(2 * theta) * std::sin(phi) * pauli_y() +
         std::cos(2 * theta) * pauli_z();
}

}  // namespace

TEST(Eigh, PauliZ) {
  const auto es = linalg::eigh(pauli_z());
  EXPECT_DOUBLE_EQ(es.values[0], -1.0);
  EXPECT_DOUBLE_EQ(es.values[1], 1.0);
  EXPECT_LT(max_abs_diff(es.vectors.matrix(), ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0})), 1e-15);
}

TEST(Eigh, PauliXWithPhaseConvention) {
  const auto es = linalg::eigh(pauli_x());
  EXPECT_NEAR(es.values[0], -1.0, 1e-15);
  EXPECT_NEAR(es.values[1], 1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  // Ties in magnitude resolve to the first component being real-positive.
  EXPECT_LT(max_abs_diff(es.vectors.matrix(), ComplexMatrix(2, 2, {r, r, -r, r})), 1e-14);
}

TEST(Eigh, BlochVectorMatchesCharacteristicPolynomial) {
  const ComplexMatrix h = bloch(pi / 6, 0.3);
  // Independent route: roots of lambda^2 - tr(H) lambda + det(H).
  const Complex tr = h(0, 0) + h(1, 1);
  const Complex det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  const double lo = ((tr - disc) / 2.0).real();
  const double hi = ((tr + disc) / 2.0).real();
  const auto es = linalg::eigh(h);
  EXPECT_NEAR(es.values[0], lo, 1e-14);
  EXPECT_NEAR(es.values[1], hi, 1e-14);
  EXPECT_NEAR(lo, -1.0, 1e-14);
  EXPECT_NEAR(hi, 1.0, 1e-14);
}

TEST(Eigh, RejectsNonHermitian) {
  ComplexMatrix m = pauli_x();
  m(0, 1) = 2.0;
  try {
    linalg::eigh(m);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::symmetry_violation);
  }
}

TEST(Eigh, ReconstructionAndResidualOnRandomInputs) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 2; n <= 16; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const ComplexMatrix h = fixtures::random_hermitian(n, rng);
      const auto es = linalg::eigh(h);
      const ComplexMatrix& v = es.vectors.matrix();
      std::vector<Complex> d(es.values.begin(), es.values.end());
      const double hn = frobenius_norm(h);
      EXPECT_LT(frobenius_norm(v * ComplexMatrix::diagonal(d) * v.adjoint() - h), 1e-9 * hn) << "n=" << n;
      EXPECT_LT(unitarity_defect(v), 1e-12);
      for (std::size_t k = 0; k < n; ++k) {
        const Ket col = v.column(k);
        EXPECT_LT(distance(h * col, scaled(col, es.values[k])), 1e-10 * hn);
        if (k > 0) {
          EXPECT_LE(es.values[k - 1], es.values[k]);
        }
      }
    }
  }
}

TEST(Eigh, DegenerateInputStillOrthonormal) {
  std::mt19937_64 rng(11);
  const ComplexMatrix u = fixtures::random_unitary(5, rng);
  const ComplexMatrix d = ComplexMatrix::diagonal({1.0, 1.0, 1.0, 3.0, 3.0});
  const auto es = linalg::eigh(hermitian_part(u * d * u.adjoint()));
  EXPECT_LT(unitarity_defect(es.vectors.matrix()), 1e-12);
  EXPECT_NEAR(es.values[0], 1.0, 1e-12);
  EXPECT_NEAR(es.values[4], 3.0, 1e-12);
}

TEST(GroupDegenerate, Examples) {
  using G = std::vector<std::vector<std::size_t>>;
  EXPECT_EQ(linalg::group_degenerate({-1.0, 1.0}, 1e-8), (G{{0}, {1}}));
  EXPECT_EQ(linalg::group_degenerate({0.5, 0.5, 2.5}, 1e-8), (G{{0, 1}, {2}}));
  // gap 1e-12 <= 1e-8 * max(1, 1.0); gap 0.1 is not.
  EXPECT_EQ(linalg::group_degenerate({1.0, 1.0 + 1e-12, 1.1}, 1e-8), (G{{0, 1}, {2}}));
  EXPECT_EQ(linalg::group_degenerate({}, 1e-8), G{});
}

TEST(UnitaryExp, Examples) {
  EXPECT_LT(max_abs_diff(linalg::unitary_exp(ComplexMatrix(3, 3)), ComplexMatrix::identity(3)), 1e-15);

  const ComplexMatrix a = Complex(0.0, pi / 2) * pauli_z();
  EXPECT_LT(max_abs_diff(linalg::unitary_exp(a), ComplexMatrix::diagonal({I_unit, -I_unit})), 1e-15);

  // exp(i a sigma) = cos(a) I + i sin(a) sigma
  const ComplexMatrix b = Complex(0.0, 0.7) * pauli_x();
  const ComplexMatrix expected = std::cos(0.7) * ComplexMatrix::identity(2) + Complex(0.0, std::sin(0.7)) * pauli_x();
  EXPECT_LT(max_abs_diff(linalg::unitary_exp(b), expected), 1e-15);
}

TEST(UnitaryExp, AgreesWithTaylorReference) {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 8; ++n) {
    ComplexMatrix a = Complex(0.0, 1.0) * fixtures::random_hermitian(n, rng);
    a *= Complex(1.0 / std::max(1.0, frobenius_norm(a)));  // ||A|| <= 1
    const ComplexMatrix u = linalg::unitary_exp(a);
    EXPECT_LT(unitarity_defect(u), 1e-10);
    EXPECT_LT(max_abs_diff(u, fixtures::taylor_expm(a)), 1e-12) << "n=" << n;
  }
}

TEST(UnitaryExp, RejectsNonSkewHermitian) {
  EXPECT_THROW(linalg::unitary_exp(pauli_x()), Error);
}

TEST(MatrixLog, Examples) {
  EXPECT_LT(max_abs_diff(linalg::matrix_log_unitary(ComplexMatrix::identity(2)), ComplexMatrix(2, 2)), 1e-15);
  const ComplexMatrix l = linalg::matrix_log_unitary(ComplexMatrix::diagonal({I_unit, -I_unit}));
  EXPECT_LT(max_abs_diff(l, ComplexMatrix::diagonal({Complex(0, pi / 2), Complex(0, -pi / 2)})), 1e-14);

  const ComplexMatrix a = Complex(0.0, 0.4) * pauli_y();
  EXPECT_LT(max_abs_diff(linalg::matrix_log_unitary(linalg::unitary_exp(a)), a), 1e-14);
}

TEST(MatrixLog, BranchCut) {
  const ComplexMatrix u = ComplexMatrix::diagonal({-1.0, 1.0});
  try {
    linalg::matrix_log_unitary(u);
    FAIL() << "expected branch ambiguity";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::branch_ambiguity);
    EXPECT_NE(std::string(e.what()).find("(-1,"), std::string::npos);
  }
  const ComplexMatrix l = linalg::matrix_log_unitary(u, linalg::BranchPolicy::permit);
  EXPECT_NEAR(l(0, 0).imag(), pi, 1e-15);
}

TEST(MatrixLog, RoundTripOnRandomGenerators) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rep % 6;
    ComplexMatrix a = Complex(0.0, 1.0) * fixtures::random_hermitian(n, rng);
    a *= Complex(2.0 / std::max(2.0, frobenius_norm(a)));  // ||A||_F <= 2
    const ComplexMatrix u = linalg::unitary_exp(a);
    EXPECT_LT(frobenius_norm(linalg::unitary_exp(linalg::matrix_log_unitary(u)) - u), 1e-9);
    EXPECT_LT(frobenius_norm(linalg::matrix_log_unitary(u) - a), 1e-8);
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST(MatrixLog, JointDiagonalizationSeparatesConjugatePairs) {
  // e^{i a} and e^{-i a} share the cosine; only the sine tells them apart.
  std::mt19937_64 rng(17);
  const ComplexMatrix v = fixtures::random_unitary(4, rng);
  const ComplexMatrix d = ComplexMatrix::diagonal({std::polar(1.0, 0.9), std::polar(1.0, -0.9),
                                                    std::polar(1.0, 0.9), std::polar(1.0, 2.0)});
  const ComplexMatrix u = v * d * v.adjoint();
  const ComplexMatrix l = linalg::matrix_log_unitary(u);
  EXPECT_LT(frobenius_norm(linalg::unitary_exp(l) - u), 1e-12);
  const auto phases = linalg::unitary_eigenphases(u);
  EXPECT_NEAR(phases[0], 0.9, 1e-12);
  EXPECT_NEAR(phases[1], 0.9, 1e-12);
  EXPECT_NEAR(phases[2], 2.0, 1e-12);
  EXPECT_NEAR(phases[3], two_pi - 0.9, 1e-12);
}

TEST(OverlapMatrix, Examples) {
  std::mt19937_64 rng(19);
  const Frame f = fixtures::random_frame(6, 3, rng);
  EXPECT_LT(frobenius_norm(linalg::overlap_matrix(f, f) - ComplexMatrix::identity(3)), 1e-10);

  const Frame e1 = Frame::from_ket({1.0, 0.0});
  const Frame e2 = Frame::from_ket({0.0, 1.0});
  EXPECT_EQ(linalg::overlap_matrix(e1, e2)(0, 0), Complex(0.0));

  // G = exp(i eps sigma_x) F with F = I: overlap = exp(i eps sigma_x) = I + i eps sigma_x + O(eps^2)
  const double eps = 1e-3;
  const Frame id(ComplexMatrix::identity(2));
  const Frame g(linalg::unitary_exp(Complex(0.0, eps) * pauli_x()));
  const ComplexMatrix first_order = ComplexMatrix::identity(2) + Complex(0.0, eps) * pauli_x();
  const double dev = max_abs_diff(linalg::overlap_matrix(id, g), first_order);
  EXPECT_LT(dev, eps * eps);
  EXPECT_GT(dev, 0.25 * eps * eps);

  EXPECT_THROW(linalg::overlap_matrix(e1, Frame(ComplexMatrix::identity(2))), Error);
}

TEST(PolarUnitary, Examples) {
  std::mt19937_64 rng(23);
  const ComplexMatrix u = fixtures::random_unitary(4, rng);
  EXPECT_LT(max_abs_diff(linalg::polar_unitary(u), u), 1e-12);
  EXPECT_LT(max_abs_diff(linalg::polar_unitary(2.0 * ComplexMatrix::identity(3)), ComplexMatrix::identity(3)), 1e-15);

  // Diagonal case: per-entry normalization of 1 +/- 0.1 i.
  const ComplexMatrix m = ComplexMatrix::identity(2) + Complex(0.0, 0.1) * pauli_z();
  const ComplexMatrix expected = ComplexMatrix::diagonal(
      {Complex(1.0, 0.1) / std::abs(Complex(1.0, 0.1)), Complex(1.0, -0.1) / std::abs(Complex(1.0, -0.1))});
  EXPECT_LT(max_abs_diff(linalg::polar_unitary(m), expected), 1e-15);
  EXPECT_LT(max_abs_diff(expected, linalg::unitary_exp(Complex(0.0, std::atan(0.1)) * pauli_z())), 1e-15);
}

TEST(PolarUnitary, NearestUnitaryAndIdempotent) {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const ComplexMatrix m = fixtures::random_matrix(n, rng);
    const ComplexMatrix u = linalg::polar_unitary(m);
    EXPECT_LT(unitarity_defect(u), 1e-10);
    EXPECT_LT(frobenius_norm(linalg::polar_unitary(u) - u), 1e-10);
    // P = U^dagger M must be Hermitian positive.
    const ComplexMatrix p = u.adjoint() * m;
    EXPECT_LT(hermiticity_defect(p), 1e-10 * frobenius_norm(m));
    EXPECT_GT(linalg::eigh(hermitian_part(p)).values.front(), 0.0);
    // No random unitary nearby beats it.
    const double best = frobenius_norm(m - u);
    for (int k = 0; k < 5; ++k) {
      const ComplexMatrix w = u * fixtures::random_unitary(n, rng, 0.05);
      EXPECT_GE(frobenius_norm(m - w), best - 1e-12);
    }
  }
}

TEST(PolarUnitary, SingularRejected) {
  try {
    linalg::polar_unitary(ComplexMatrix::diagonal({1.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank_deficiency);
  }
}

TEST(Frame, RejectsNonOrthonormal) {
  EXPECT_THROW(Frame(ComplexMatrix(2, 1, {1.0, 1.0})), Error);
  EXPECT_THROW(Frame(ComplexMatrix(1, 2, {1.0, 0.0})), Error);
}

TEST(SpectrumDistance, HandlesWrapAround) {
  EXPECT_NEAR(linalg::spectrum_distance({1e-13, 0.5}, {two_pi - 1e-13, 0.5}), 2e-13, 1e-15);
  EXPECT_NEAR(linalg::spectrum_distance({0.1, 3.0}, {3.0, 0.1}), 0.0, 1e-15);
  EXPECT_NEAR(linalg::spectrum_distance({0.0}, {pi}), pi, 1e-15);
}
