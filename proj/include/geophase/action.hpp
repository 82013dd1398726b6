#pragma once

// Geometric phase of an eigenfunction family living on an n-torus of angle
// variables, transported around a closed loop of an external parameter.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/holonomy.hpp"
#include "geophase/linalg.hpp"
#include "geophase/torus.hpp"

namespace geophase {

namespace action {

inline constexpr double normalization_tolerance = 1e-6;
inline constexpr double min_loop_overlap = 0.5;

/// Uniform-grid quadrature of psi^dagger phi over the torus, normalized by (2 pi)^n.
inline Complex torus_inner(const TorusSample& psi, const TorusSample& phi) {
  if (!psi.same_grid(phi)) throw Error(ErrorKind::dimension_mismatch, "torus samples on different grids");
  Complex s = 0.0;
  for (std::size_t i = 0; i < psi.values.size(); ++i) s += std::conj(psi.values[i]) * phi.values[i];
  return s / static_cast<double>(psi.point_count());
}

inline TorusWavefunction sample_family(const std::function<TorusSample(double)>& sampler,
                                       const std::vector<double>& loop_grid) {
  if (loop_grid.size() < 3) throw Error(ErrorKind::grid_too_coarse, "loop grid needs at least 3 points");
  TorusWavefunction fam{loop_grid, {}};
  fam.samples.reserve(loop_grid.size());
  for (double r : loop_grid) fam.samples.push_back(sampler(r));
  return fam;
}

/// Uniform loop grid R_k = start + k (end - start) / M, k = 0..M.
inline std::vector<double> uniform_loop(double start, double end, std::size_t intervals) {
  std::vector<double> g(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    g[k] = start + (end - start) * static_cast<double>(k) / static_cast<double>(intervals);
  return g;
}

namespace detail {

inline void require_normalized(const TorusWavefunction& family) {
  if (family.samples.size() != family.loop_grid.size() || family.samples.size() < 3)
    throw Error(ErrorKind::grid_too_coarse, "torus family needs a sample per loop point and at least 3 points");
  for (std::size_t k = 0; k < family.samples.size(); ++k) {
    const double nrm = torus_inner(family.samples[k], family.samples[k]).real();
    if (std::abs(nrm - 1.0) > normalization_tolerance) {
      std::ostringstream os;
      os << "torus norm " << nrm << " at loop sample " << k << " drifts beyond " << normalization_tolerance;
      throw Error(ErrorKind::normalization_drift, os.str());
    }
  }
}

inline std::vector<Complex> interval_overlaps(const TorusWavefunction& family) {
  require_normalized(family);
  std::vector<Complex> z(family.samples.size() - 1);
  for (std::size_t k = 0; k + 1 < family.samples.size(); ++k) {
    z[k] = torus_inner(family.samples[k], family.samples[k + 1]);
    if (std::abs(z[k]) < min_loop_overlap) {
      std::ostringstream os;
      os << "overlap " << std::abs(z[k]) << " between loop samples " << k << " and " << k + 1
         << " is too small; refine the loop grid";
      throw Error(ErrorKind::grid_too_coarse, os.str());
    }
  }
  return z;
}

}  // namespace detail

/// Per-interval connection samples theta_k = i arg <psi_k|psi_{k+1}> (purely imaginary).
inline std::vector<Complex> torus_connection_samples(const TorusWavefunction& family) {
  const auto z = detail::interval_overlaps(family);
  std::vector<Complex> theta(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) theta[k] = Complex(0.0, std::arg(z[k]));
  return theta;
}

/// gamma(C) = i * sum_k theta_k, reduced to [0, 2 pi).
inline double torus_phase(const TorusWavefunction& family) {
  const auto z = detail::interval_overlaps(family);
  double sum = 0.0;
  for (const Complex& zk : z) sum += std::arg(zk);
  return wrap_phase(-sum);
}

/// The sample as a single-column frame under the Euclidean inner product:
/// entries scaled by 1/sqrt(points) so that <.|.> reproduces torus_inner.
inline Frame as_frame(const TorusSample& s, double tolerance = frame_tolerance) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.point_count()));
  Ket v(s.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.values[i] * scale;
  return Frame::from_ket(v, tolerance);
}

/// The family as a single-column frame path, for the holonomy routines.
inline FramePath as_frame_path(const TorusWavefunction& family) {
  detail::require_normalized(family);
  FramePath path;
  path.grid = family.loop_grid;
  for (const TorusSample& s : family.samples) path.frames.push_back(as_frame(s, 1e-8));
  path.closure_defect = frobenius_norm(path.frames.back().matrix() - path.frames.front().matrix());
  return path;
}

}  // namespace action
}  // namespace geophase
