#pragma once

// States of the ring spread over several angular-momentum blocks n. Each block
// holds a two-component amplitude in the basis its block Hamiltonian uses.
// Different n are orthogonal after the phi integral, so inner products and
// evolution factor block by block.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/evolution.hpp"
#include "geophase/linalg.hpp"
#include "geophase/models.hpp"

namespace geophase {

struct RingState {
  std::map<int, Ket> blocks;  // populated n only

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [n, v] : blocks) s += std::pow(norm(v), 2);
    return s;
  }
  double weight(int n) const {
    const auto it = blocks.find(n);
    return it == blocks.end() ? 0.0 : std::pow(norm(it->second), 2);
  }
};

inline Complex ring_inner(const RingState& a, const RingState& b) {
  Complex s = 0.0;
  for (const auto& [n, v] : a.blocks) {
    const auto it = b.blocks.find(n);
    if (it == b.blocks.end()) continue;
    if (v.size() != it->second.size()) throw Error(ErrorKind::dimension_mismatch, "ring blocks of different size");
    s += inner(v, it->second);
  }
  return s;
}

inline RingState normalized(const RingState& s) {
  const double nrm = std::sqrt(s.norm_squared());
  if (!(nrm > 0.0)) throw Error(ErrorKind::not_normalized, "cannot normalize the zero ring state");
  RingState out;
  for (const auto& [n, v] : s.blocks) out.blocks[n] = scaled(v, 1.0 / nrm);
  return out;
}

struct RingTrajectory {
  std::vector<double> grid;
  std::vector<RingState> states;
  std::map<int, Trajectory> blocks;  // per-block trajectory of the block's unit direction
};

/// Evolve every populated block independently under its own Hamiltonian. All blocks share
/// one time grid: `steps` steps over opts.duration, or over the first populated block's period.
inline RingTrajectory blockwise_evolve(const std::map<int, OperatorFamily>& h_blocks, const RingState& psi,
                                       std::size_t steps, EvolveOptions opts = {}) {
  if (psi.blocks.empty()) throw Error(ErrorKind::invalid_parameter, "ring state has no populated blocks");
  if (std::abs(psi.norm_squared() - 1.0) > 1e-10) throw Error(ErrorKind::not_normalized, "ring state is not normalized");
  for (const auto& [n, v] : psi.blocks)
    if (!h_blocks.count(n))
      throw Error(ErrorKind::invalid_parameter, "no block Hamiltonian for n = " + std::to_string(n));
  if (!opts.duration) opts.duration = h_blocks.at(psi.blocks.begin()->first).period();

  RingTrajectory out;
  std::map<int, double> amplitude;
  for (const auto& [n, v] : psi.blocks) {
    const double a = norm(v);
    amplitude[n] = a;
    // An empty block stays empty; it still gets a trajectory so the grids line up.
    const Ket dir = a > 0.0 ? scaled(v, 1.0 / a) : [&] {
      Ket e(v.size(), 0.0);
      e[0] = 1.0;
      return e;
    }();
    out.blocks.emplace(n, evolve(h_blocks.at(n), dir, steps, opts));
  }
  out.grid = out.blocks.begin()->second.grid;
  out.states.resize(out.grid.size());
  for (std::size_t k = 0; k < out.grid.size(); ++k)
    for (const auto& [n, tr] : out.blocks) out.states[k].blocks[n] = scaled(tr.states[k], amplitude[n]);
  return out;
}

}  // namespace geophase
