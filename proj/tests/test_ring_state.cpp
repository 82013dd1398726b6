#include <gtest/gtest.h>

#include <cmath>

#include "geophase/evolution.hpp"
#include "geophase/models.hpp"
#include "geophase/ring_state.hpp"

using namespace geophase;

namespace {

const double h = std::sqrt(0.5);

models::RingStaticModel two_blocks() {
  RingModelParams p;
  p.n_levels = {0, 1};
  p.theta = pi / 6;
  return models::ring_static(p);
}

std::map<int, OperatorFamily> hamiltonians(const models::RingStaticModel& m) {
  std::map<int, OperatorFamily> out;
  for (const auto& b : m.blocks) out.emplace(b.n, b.hamiltonian);
  return out;
}

}  // namespace

TEST(RingInner, Examples) {
  RingState a;
  a.blocks[0] = {0.6, Complex(0.0, 0.8)};
  EXPECT_NEAR(ring_inner(a, a).real(), 1.0, 1e-15);
  RingState b;
  b.blocks[1] = {1.0, 0.0};
  EXPECT_EQ(ring_inner(a, b), Complex(0.0));
  RingState c;
  c.blocks[0] = {h, 0.0};  // |xi_0+> / sqrt 2
  c.blocks[1] = {h, 0.0};  // |xi_1+> / sqrt 2
  EXPECT_NEAR(c.weight(0), 0.5, 1e-15);
  EXPECT_NEAR(ring_inner(c, c).real(), 1.0, 1e-15);
}

TEST(RingInner, Normalized) {
  RingState s;
  s.blocks[2] = {3.0, 0.0};
  s.blocks[5] = {0.0, Complex(0.0, 4.0)};
  const RingState u = normalized(s);
  EXPECT_NEAR(u.norm_squared(), 1.0, 1e-15);
  EXPECT_NEAR(u.weight(5), 16.0 / 25.0, 1e-15);
  EXPECT_THROW(normalized(RingState{}), Error);
}

TEST(BlockwiseEvolve, SingleBlockMatchesEvolve) {
  const auto m = two_blocks();
  RingState s;
  s.blocks[1] = m.block(1).initial_state(-1);
  const RingTrajectory tr = blockwise_evolve(hamiltonians(m), s, 256);
  const Trajectory direct = evolve(m.block(1).hamiltonian, s.blocks[1], 256);
  ASSERT_EQ(tr.grid.size(), direct.grid.size());
  for (std::size_t k = 0; k < tr.grid.size(); ++k) EXPECT_EQ(distance(tr.states[k].blocks.at(1), direct.states[k]), 0.0);
}

TEST(BlockwiseEvolve, WeightsConstantAndPhasesMatchSingleBlocks) {
  const auto m = two_blocks();
  RingState s;
  s.blocks[0] = scaled(m.block(0).initial_state(+1), h);
  s.blocks[1] = scaled(m.block(1).initial_state(+1), h);
  const RingTrajectory tr = blockwise_evolve(hamiltonians(m), s, 4096);
  for (const RingState& st : tr.states) {
    EXPECT_NEAR(st.weight(0), 0.5, 1e-10);
    EXPECT_NEAR(st.weight(1), 0.5, 1e-10);
    EXPECT_NEAR(st.norm_squared(), 1.0, 1e-10);
  }
  // One period of block 0 is three periods of block 1, since Omega_ns scales with n + 1/2.
  const double g0 = aa_phase(tr.blocks.at(0)).geometric;
  const double g1 = aa_phase(tr.blocks.at(1)).geometric;
  const double single0 = aa_phase(m.block(0).hamiltonian, m.block(0).initial_state(+1)).geometric;
  const double single1 = aa_phase(m.block(1).hamiltonian, m.block(1).initial_state(+1)).geometric;
  EXPECT_LT(phase_distance(g0, single0), 1e-6);
  EXPECT_LT(phase_distance(g1, 3.0 * single1), 1e-6);
}

TEST(BlockwiseEvolve, MissingBlockRejected) {
  const auto m = two_blocks();
  RingState s;
  s.blocks[4] = {1.0, 0.0};
  EXPECT_THROW(blockwise_evolve(hamiltonians(m), s, 16), Error);
  RingState bad;
  bad.blocks[0] = {1.0, 1.0};
  EXPECT_THROW(blockwise_evolve(hamiltonians(m), bad, 16), Error);
}
