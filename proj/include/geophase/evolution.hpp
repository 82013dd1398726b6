#pragma once

// Schroedinger propagation (hbar = 1) by the midpoint exponential rule
//   U_k = exp(-i H(t_k + dt/2) dt),
// and the split of a cyclic evolution's total phase into dynamic and geometric parts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/linalg.hpp"
#include "geophase/models.hpp"

namespace geophase {

inline constexpr std::size_t default_steps = 4096;
inline constexpr double default_cyclicity_threshold = 1e-4;

struct EvolveOptions {
  std::optional<double> duration;  // defaults to the family's period
  std::size_t record_stride = 1;   // keep every record_stride-th grid point (the endpoint is always kept)
};

struct Trajectory {
  std::vector<double> grid;                 // recorded times, grid.front() = 0, grid.back() = T
  std::vector<Ket> states;                  // psi(t) at each recorded time
  std::vector<ComplexMatrix> propagators;   // U(t; 0) at each recorded time
  std::vector<double> dynamic_integrand;    // <psi|H|psi> at each recorded time
  std::size_t step_count = 0;               // integration steps, independent of recording
  double dynamic_phase = 0.0;               // trapezoid of -<psi|H|psi> over every integration step

  const Ket& initial() const { return states.front(); }
  const Ket& final() const { return states.back(); }
};

struct PhaseReport {
  double total = 0.0;      // [0, 2 pi)
  double dynamic = 0.0;    // unreduced
  double geometric = 0.0;  // [0, 2 pi)
  double cyclicity_defect = 0.0;
  std::size_t step_count = 0;
  std::optional<double> convergence_estimate;  // |geometric(M) - geometric(M/2)| when requested
};

struct TotalPhase {
  double phase = 0.0;
  double cyclicity_defect = 0.0;
  bool cyclic = true;
};

inline Trajectory evolve(const OperatorFamily& h, const Ket& psi0, std::size_t steps, const EvolveOptions& opts = {}) {
  if (psi0.size() != h.dim()) throw Error(ErrorKind::dimension_mismatch, "initial state does not match H");
  if (steps < 2) throw Error(ErrorKind::invalid_parameter, "evolve needs at least 2 steps");
  if (opts.record_stride == 0) throw Error(ErrorKind::invalid_parameter, "record_stride must be positive");
  const double nrm = norm(psi0);
  if (std::abs(nrm - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "initial state has norm " << nrm;
    throw Error(ErrorKind::not_normalized, os.str());
  }
  const double duration = opts.duration.value_or(h.period());
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw Error(ErrorKind::invalid_parameter, "evolution duration must be positive");
  const double dt = duration / static_cast<double>(steps);

  Trajectory tr;
  tr.step_count = steps;
  ComplexMatrix u = ComplexMatrix::identity(h.dim());
  Ket psi = psi0;
  double energy = expectation(psi, h(0.0), psi).real();
  auto record = [&](double t) {
    tr.grid.push_back(t);
    tr.states.push_back(psi);
    tr.propagators.push_back(u);
    tr.dynamic_integrand.push_back(energy);
  };
  record(0.0);

  double integral = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt * static_cast<double>(k);
    const ComplexMatrix step = linalg::propagator(h(t + 0.5 * dt), dt);
    u = step * u;
    psi = step * psi;
    const double t_next = k + 1 == steps ? duration : dt * static_cast<double>(k + 1);
    const double next_energy = expectation(psi, h(t_next), psi).real();
    integral += 0.5 * dt * (energy + next_energy);
    energy = next_energy;
    if ((k + 1) % opts.record_stride == 0 || k + 1 == steps) record(t_next);
  }
  tr.dynamic_phase = -integral;
  return tr;
}

/// -integral <psi|H|psi> dt over the trajectory (trapezoid on the integration grid).
inline double dynamic_phase(const Trajectory& tr) { return tr.dynamic_phase; }

inline TotalPhase total_phase(const Trajectory& tr, double threshold = default_cyclicity_threshold) {
  const Complex z = inner(tr.initial(), tr.final());
  TotalPhase out;
  out.phase = wrap_phase(std::arg(z));
  out.cyclicity_defect = std::clamp(1.0 - std::abs(z), 0.0, 1.0);
  out.cyclic = out.cyclicity_defect <= threshold;
  return out;
}

inline PhaseReport aa_phase(const Trajectory& tr, double threshold = default_cyclicity_threshold) {
  const TotalPhase tp = total_phase(tr, threshold);
  if (!tp.cyclic) {
    std::ostringstream os;
    os << "evolution is not cyclic: 1 - |<psi(0)|psi(T)>| = " << tp.cyclicity_defect << " exceeds " << threshold;
    throw Error(ErrorKind::non_cyclic, os.str());
  }
  PhaseReport r;
  r.total = tp.phase;
  r.dynamic = dynamic_phase(tr);
  r.geometric = wrap_phase(tp.phase - r.dynamic);
  r.cyclicity_defect = tp.cyclicity_defect;
  r.step_count = tr.step_count;
  return r;
}

/// Evolve over one period and decompose; the convergence estimate comes from a rerun at half the steps.
inline PhaseReport aa_phase(const OperatorFamily& h, const Ket& psi0, std::size_t steps = default_steps,
                            double threshold = default_cyclicity_threshold) {
  EvolveOptions opts;
  opts.record_stride = steps;
  PhaseReport r = aa_phase(evolve(h, psi0, steps, opts), threshold);
  const std::size_t half = std::max<std::size_t>(2, steps / 2);
  opts.record_stride = half;
  const PhaseReport coarse = aa_phase(evolve(h, psi0, half, opts), threshold);
  r.convergence_estimate = phase_distance(r.geometric, coarse.geometric);
  return r;
}

}  // namespace geophase
