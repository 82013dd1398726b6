#include <gtest/gtest.h>

#include <cmath>

#include "geophase/evolution.hpp"
#include "geophase/models.hpp"
#include "test_support.hpp"

using namespace geophase;
using fixtures::max_abs_diff;

namespace {

// Exact state of the rotating-ring block: with R(a) = diag(1, e^{-i a}) the
// Hamiltonian is R(w t) H0 R(w t)^dagger, so psi(t) = R(w t) exp(-i (H0 - w (1 - sigma_z)/2) t) psi0.
Ket rotating_exact(const RingModelParams& p, int n, const Ket& psi0, double t) {
  const ComplexMatrix k0 = models::ring_kinetic_block(p, n, 0.0);
  const ComplexMatrix h_eff = p.Omega * (k0 * k0) - (0.5 * p.omega_o) * (ComplexMatrix::identity(2) - pauli_z());
  const ComplexMatrix frame_u = fixtures::taylor_expm(Complex(0.0, -t) * hermitian_part(h_eff));
  const ComplexMatrix rot = ComplexMatrix::diagonal({1.0, std::polar(1.0, -p.omega_o * t)});
  return rot * (frame_u * psi0);
}

RingModelParams rotating_params() {
  RingModelParams p;
  p.epsilon = 0.5;
  p.chi = pi / 3;
  p.omega_o = 0.8;
  p.n_levels = {0, 1};
  return p;
}

}  // namespace

TEST(Evolve, ZeroHamiltonian) {
  const OperatorFamily zero(2, 1.0, [](double) { return ComplexMatrix(2, 2); });
  const Ket psi0{std::sqrt(0.5), Complex(0.0, std::sqrt(0.5))};
  const Trajectory tr = evolve(zero, psi0, 16);
  ASSERT_EQ(tr.states.size(), 17u);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    EXPECT_LT(distance(tr.states[k], psi0), 1e-15);
    EXPECT_LT(max_abs_diff(tr.propagators[k], ComplexMatrix::identity(2)), 1e-15);
  }
  EXPECT_EQ(dynamic_phase(tr), 0.0);
}

TEST(Evolve, SpinEigenstateMatchesClosedFormPropagator) {
  const auto m = models::spin_half({1.7, 0.0});
  const Trajectory tr = evolve(m.hamiltonian, {1.0, 0.0}, 256);
  for (std::size_t k = 0; k < tr.grid.size(); k += 17) {
    const double t = tr.grid[k];
    const ComplexMatrix exact = ComplexMatrix::diagonal({std::polar(1.0, -0.85 * t), std::polar(1.0, 0.85 * t)});
    EXPECT_LT(max_abs_diff(tr.propagators[k], exact), 1e-12);
  }
  EXPECT_LT(distance(tr.final(), Ket{-1.0, 0.0}), 1e-12);
  EXPECT_NEAR(total_phase(tr).phase, pi, 1e-12);
}

TEST(Evolve, SpinTracksPrecessingFrame) {
  const auto m = models::spin_half({1.0, pi / 6});
  const Trajectory tr = evolve(m.hamiltonian, m.initial_state(+1), 512);
  for (std::size_t k = 0; k < tr.grid.size(); k += 31) {
    const double t = tr.grid[k];
    const Ket expected = scaled(m.reference.frames.at("phi+")(t).column(0), std::polar(1.0, -0.5 * t));
    EXPECT_LT(distance(tr.states[k], expected), 1e-12);
    EXPECT_LT(distance(tr.propagators[k] * tr.initial(), tr.states[k]), 1e-12);
  }
}

TEST(Evolve, RejectsBadInput) {
  const auto m = models::spin_half({1.0, 0.3});
  try {
    evolve(m.hamiltonian, {1.0, 1.0}, 8);
    FAIL() << "expected not_normalized";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_normalized);
  }
  EXPECT_THROW(evolve(m.hamiltonian, {1.0, 0.0}, 1), Error);
  EXPECT_THROW(evolve(m.hamiltonian, {1.0, 0.0, 0.0}, 8), Error);
}

TEST(Evolve, RecordStrideKeepsEndpoint) {
  const auto m = models::spin_half({1.0, 0.3});
  EvolveOptions opts;
  opts.record_stride = 100;
  const Trajectory strided = evolve(m.hamiltonian, m.initial_state(+1), 250, opts);
  const Trajectory full = evolve(m.hamiltonian, m.initial_state(+1), 250);
  ASSERT_EQ(strided.grid.size(), 4u);
  EXPECT_DOUBLE_EQ(strided.grid.back(), m.period);
  EXPECT_LT(distance(strided.final(), full.final()), 1e-15);
  EXPECT_NEAR(strided.dynamic_phase, full.dynamic_phase, 1e-14);
}

TEST(Evolve, NormPreservedUnderTimeDependentHamiltonian) {
  const auto model = models::ring_rotating(rotating_params());
  const auto& b = model.blocks[1];
  const Ket psi0 = normalized({Complex(0.3, 0.1), Complex(-0.8, 0.4)});
  const Trajectory tr = evolve(b.hamiltonian, psi0, 1024);
  for (const Ket& s : tr.states) EXPECT_NEAR(norm(s), 1.0, 1e-10);
  for (const ComplexMatrix& u : tr.propagators) EXPECT_LT(unitarity_defect(u), 1e-10);
}

TEST(Evolve, SecondOrderOnRotatingRing) {
  const RingModelParams p = rotating_params();
  const auto model = models::ring_rotating(p);
  const auto& b = model.blocks[0];
  const Ket psi0 = normalized({Complex(0.6, 0.0), Complex(0.2, -0.77)});
  const Ket exact = rotating_exact(p, b.n, psi0, b.period);
  double previous = 0.0;
  for (std::size_t steps : {64u, 128u, 256u, 512u}) {
    EvolveOptions opts;
    opts.record_stride = steps;
    const double err = distance(evolve(b.hamiltonian, psi0, steps, opts).final(), exact);
    if (previous > 0.0) {
      EXPECT_GT(previous / err, 3.5) << steps;
      EXPECT_LT(previous / err, 4.5) << steps;
    }
    previous = err;
  }
}

TEST(DynamicPhase, SpinClosedForm) {
  for (double th : {pi / 6, pi / 4, 1.1}) {
    const auto m = models::spin_half({1.0, th});
    EXPECT_NEAR(dynamic_phase(evolve(m.hamiltonian, m.initial_state(+1), 256)), -pi * std::cos(2 * th), 1e-12);
    EXPECT_NEAR(dynamic_phase(evolve(m.hamiltonian, m.initial_state(-1), 256)), pi * std::cos(2 * th), 1e-12);
  }
}

TEST(DynamicPhase, GlobalPhaseInvariant) {
  const auto m = models::spin_half({1.0, 0.4});
  const Ket a = m.initial_state(+1);
  const Ket b = scaled(a, std::polar(1.0, 2.2));
  EXPECT_NEAR(dynamic_phase(evolve(m.hamiltonian, a, 64)), dynamic_phase(evolve(m.hamiltonian, b, 64)), 1e-14);
}

TEST(TotalPhase, HandBuiltTrajectories) {
  Trajectory tr;
  tr.states = {{1.0, 0.0}, {1.0, 0.0}};
  TotalPhase tp = total_phase(tr);
  EXPECT_EQ(tp.phase, 0.0);
  EXPECT_EQ(tp.cyclicity_defect, 0.0);
  tr.states.back() = {std::polar(1.0, pi / 3), 0.0};
  tp = total_phase(tr);
  EXPECT_NEAR(tp.phase, pi / 3, 1e-15);
  EXPECT_NEAR(tp.cyclicity_defect, 0.0, 1e-15);
  tr.states.back() = {0.0, 1.0};
  tp = total_phase(tr);
  EXPECT_FALSE(tp.cyclic);
  EXPECT_EQ(tp.cyclicity_defect, 1.0);
}

TEST(AaPhase, SpinDecomposition) {
  const auto m = models::spin_half({1.0, pi / 6});
  const PhaseReport up = aa_phase(m.hamiltonian, m.initial_state(+1));
  const PhaseReport dn = aa_phase(m.hamiltonian, m.initial_state(-1));
  EXPECT_LT(phase_distance(up.total, pi), 1e-10);
  EXPECT_LT(phase_distance(up.geometric, 1.5 * pi), 1e-10);
  EXPECT_LT(phase_distance(dn.geometric, 0.5 * pi), 1e-10);
  EXPECT_EQ(up.step_count, default_steps);
  ASSERT_TRUE(up.convergence_estimate.has_value());
  EXPECT_LT(*up.convergence_estimate, 1e-10);
  for (const PhaseReport& r : {up, dn}) EXPECT_LT(phase_distance(r.total - r.dynamic - r.geometric, 0.0), 1e-12);
}

TEST(AaPhase, EigenstateHasTrivialGeometricPhase) {
  const auto m = models::spin_half({2.0, 0.0});
  EXPECT_LT(phase_distance(aa_phase(m.hamiltonian, m.initial_state(+1)).geometric, 0.0), 1e-10);
}

TEST(AaPhase, GaugeRobust) {
  const auto m = models::spin_half({1.0, 0.9});
  const Ket a = m.initial_state(-1);
  const double g1 = aa_phase(m.hamiltonian, a).geometric;
  const double g2 = aa_phase(m.hamiltonian, scaled(a, std::polar(1.0, -1.3))).geometric;
  EXPECT_LT(phase_distance(g1, g2), 1e-10);
}

TEST(AaPhase, NonCyclicRejected) {
  const auto m = models::spin_half({1.0, pi / 6});
  EvolveOptions opts;
  opts.duration = 0.5 * m.period;
  try {
    aa_phase(evolve(m.hamiltonian, m.initial_state(+1), 128, opts));
    FAIL() << "expected non_cyclic";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_cyclic);
  }
}
