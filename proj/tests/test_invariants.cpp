#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "geophase/invariants.hpp"
#include "geophase/models.hpp"
#include "test_support.hpp"

using namespace geophase;
using namespace geophase::invariants;

namespace {

OperatorFamily constant(const ComplexMatrix& m, double period = 1.0) {
  return OperatorFamily(m.rows(), period, [m](double) { return m; });
}

RingModelParams ring_params(double omega_o = 0.0) {
  RingModelParams p;
  p.n_levels = {0, 1, 2};
  p.omega_o = omega_o;
  return p;
}

}  // namespace

TEST(InvarianceResidual, ConstantCommutingPair) {
  const auto z = constant(pauli_z());
  EXPECT_LT(invariance_residual(z, z, uniform_times(1.0, 10)), 1e-12);
}

TEST(InvarianceResidual, NonCommutingConstants) {
  const double r = invariance_residual(constant(pauli_x()), constant(pauli_z()), {0.0, 0.5});
  EXPECT_NEAR(r, 2 * std::sqrt(2.0), 1e-12);
}

TEST(InvarianceResidual, SpinModel) {
  const auto m = models::spin_half({1.0, pi / 6});
  EXPECT_LT(invariance_residual(m.invariant, m.hamiltonian, uniform_times(m.period, 100)), 1e-9);
}

TEST(InvarianceResidual, WrongSignDetected) {
  // I(t) precessing against H is not invariant; the residual is 2 omega sin 2 theta.
  const auto m = models::spin_half({1.0, pi / 6});
  const OperatorFamily neg_h(2, m.period, [&](double t) { return -1.0 * m.hamiltonian(t); });
  EXPECT_NEAR(invariance_residual(m.invariant, neg_h, {0.3}), 2 * std::sqrt(2.0) * std::sin(pi / 3), 1e-8);
}

TEST(EigenvalueDrift, Examples) {
  EXPECT_EQ(eigenvalue_drift(constant(pauli_y()), uniform_times(1.0, 5)), 0.0);
  const auto m = models::spin_half({1.0, 0.7});
  EXPECT_LT(eigenvalue_drift(m.invariant, uniform_times(m.period, 50)), 1e-10);
  // (1 + t/T) sigma_z on [0, T), wrapped so that the family still closes.
  const OperatorFamily growing(2, 2.0, [](double t) {
    const double s = 1.0 + std::fmod(t, 2.0) / 2.0;
    return s * pauli_z();
  });
  EXPECT_NEAR(eigenvalue_drift(growing, {0.0, 1.0, 2.0 - 1e-12}), 1.0, 1e-9);
}

TEST(TransportError, TrivialPair) {
  const ComplexMatrix d = ComplexMatrix::diagonal({1.0, 2.0, 3.0});
  EXPECT_EQ(transport_error(constant(d), constant(ComplexMatrix(3, 3)), 1, 32), 0.0);
  EXPECT_EQ(transport_error(constant(d), constant(d), 2, 32), 0.0);
}

TEST(TransportError, SpinLevels) {
  const auto m = models::spin_half({1.0, pi / 6});
  EXPECT_LT(transport_error(m.invariant, m.hamiltonian, 0), 1e-6);
  EXPECT_LT(transport_error(m.invariant, m.hamiltonian, 1), 1e-6);
}

TEST(TransportError, RotatingRingDegenerateLevel) {
  const auto model = models::ring_rotating(ring_params(0.4));
  for (const auto& b : model.blocks) EXPECT_LT(transport_error(b.invariant, b.hamiltonian, 0), 1e-6);
}

TEST(TransportError, NonInvariantLeaks) {
  const auto m = models::spin_half({1.0, pi / 6});
  const OperatorFamily fixed = constant(pauli_x(), m.period);
  EXPECT_GT(transport_error(fixed, m.hamiltonian, 1, 256), 0.5);
}

TEST(TransportError, CrossingRejected) {
  const OperatorFamily crossing(2, 1.0, [](double t) { return std::cos(two_pi * t) * pauli_z(); });
  try {
    transport_error(crossing, constant(ComplexMatrix(2, 2)), 0, 64);
    FAIL() << "expected tracking_ambiguity";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::tracking_ambiguity);
  }
}

TEST(DecomposeState, Examples) {
  const ComplexMatrix d = ComplexMatrix::diagonal({-1.0, 0.5, 0.5, 2.0});
  auto w = decompose_state({0.0, 0.0, 0.0, 1.0}, d);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1].multiplicity, 2u);
  EXPECT_NEAR(w[2].weight, 1.0, 1e-15);
  EXPECT_NEAR(w[0].weight + w[1].weight, 0.0, 1e-15);
  w = decompose_state({std::sqrt(0.5), 0.0, 0.0, std::sqrt(0.5)}, d);
  EXPECT_NEAR(w[0].weight, 0.5, 1e-15);
  EXPECT_NEAR(w[2].weight, 0.5, 1e-15);
}

TEST(DecomposeState, WeightsConstantAcrossRingBlocks) {
  // Two static-ring blocks assembled into one 4-level system sharing block 0's clock.
  RingModelParams p = ring_params();
  p.n_levels = {0, 1};
  const auto model = models::ring_static(p);
  const auto& b0 = model.block(0);
  const auto& b1 = model.block(1);
  const OperatorFamily h(4, b0.period, [&](double t) { return block_diagonal({b0.hamiltonian(t), b1.hamiltonian(t)}); });
  const OperatorFamily inv(4, b0.period, [&](double t) { return block_diagonal({b0.invariant(t), b1.invariant(t)}); });

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Ket psi(4);
  for (auto& c : psi) c = Complex(nd(rng), nd(rng));
  psi = normalized(psi);

  const auto start = decompose_state(psi, inv(0.0));
  double total = 0.0;
  for (const auto& g : start) total += g.weight;
  EXPECT_NEAR(total, 1.0, 1e-10);

  const Trajectory tr = evolve(h, psi, 4096);
  for (std::size_t k = 0; k <= 10; ++k) {
    const std::size_t idx = k * (tr.grid.size() - 1) / 10;
    const auto now = decompose_state(tr.states[idx], inv(tr.grid[idx]));
    ASSERT_EQ(now.size(), start.size());
    for (std::size_t g = 0; g < now.size(); ++g) EXPECT_NEAR(now[g].weight, start[g].weight, 1e-6);
  }
}

TEST(CheckInvariant, EveryModelPair) {
  const auto spin = models::spin_half({1.0, pi / 3});
  InvarianceReport r = check_invariant(spin.invariant, spin.hamiltonian);
  EXPECT_LT(r.max_residual, 1e-8);
  EXPECT_LT(r.eigenvalue_drift, 1e-10);
  EXPECT_LT(r.transport_error, 1e-5);
  EXPECT_EQ(r.sample_times.size(), 100u);

  for (const auto& b : models::ring_static(ring_params()).blocks) {
    r = check_invariant(b.invariant, b.hamiltonian);
    EXPECT_LT(r.max_residual, 1e-8) << b.n;
    EXPECT_LT(r.eigenvalue_drift, 1e-10) << b.n;
    EXPECT_LT(r.transport_error, 1e-5) << b.n;
  }
  for (const auto& b : models::ring_rotating(ring_params(0.25)).blocks) {
    r = check_invariant(b.invariant, b.hamiltonian);
    EXPECT_LT(r.max_residual, 1e-8) << b.n;
    EXPECT_EQ(r.eigenvalue_drift, 0.0) << b.n;
    EXPECT_LT(r.transport_error, 1e-5) << b.n;
  }
}
