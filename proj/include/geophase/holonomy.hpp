#pragma once

// Discrete connections over closed paths of frames.
//
// For a path F_0 ... F_M (F_M closing the loop) the interval overlaps are
// M_k = F_k^dagger F_{k+1}. The connection sample of interval k is
// omega_k = log polar(M_k), which is exactly skew-Hermitian. From these:
//   phase matrix   Gamma = i sum_k omega_k            (Hermitian, gauge dependent)
//   Wilson loop    W = polar(M_0 M_1 ... M_{M-1})     (unitary, spectrum gauge invariant)
// With a single column, Gamma reduces to the Berry phase -sum_k arg <phi_k|phi_{k+1}>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/linalg.hpp"
#include "geophase/models.hpp"

namespace geophase {

inline constexpr std::size_t default_loop_points = 4096;

/// How a frame sampler fixes its gauge.
enum class FrameSource {
  closed_form,  // smooth and single-valued by construction; used as given
  eigensolver,  // arbitrary per-sample gauge; realigned by parallel transport
};

/// Where the holonomy of a realigned eigensolver path is placed.
enum class ClosureMode {
  last_interval,  // frames 0..M-1 parallel transported, F_M reset to F_0
  distribute,     // the closing rotation spread evenly over every interval
};

struct FramePath {
  std::vector<double> grid;   // s_0 ... s_M
  std::vector<Frame> frames;  // one per grid point
  double closure_defect = 0.0;  // ||F(s_M) - F(s_0)||_F

  std::size_t intervals() const { return frames.size() - 1; }
  std::size_t rank() const { return frames.front().count(); }
};

struct HolonomyReport {
  ComplexMatrix phase_matrix;
  ComplexMatrix wilson_unitary;
  std::optional<double> abelian_phase;  // N = 1 only, [0, 2 pi)
  std::size_t grid_size = 0;
  std::optional<double> convergence_estimate;  // ||Gamma(M) - Gamma(M/2)||_F when requested
};

namespace holonomy {

inline constexpr double min_overlap_singular_value = 0.5;

/// Closed uniform grid s_k = k T / M, k = 0..M.
inline std::vector<double> loop_grid(double period, std::size_t intervals) {
  if (intervals < 2) throw Error(ErrorKind::grid_too_coarse, "a loop needs at least 2 intervals");
  std::vector<double> g(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    g[k] = period * static_cast<double>(k) / static_cast<double>(intervals);
  g.back() = period;
  return g;
}

namespace detail {

inline ComplexMatrix checked_overlap(const FramePath& path, std::size_t k) {
  const ComplexMatrix m = linalg::overlap_matrix(path.frames[k], path.frames[k + 1]);
  const double smin = linalg::smallest_singular_value(m);
  if (smin < min_overlap_singular_value) {
    std::ostringstream os;
    os << "overlap between samples " << k << " and " << k + 1 << " has smallest singular value " << smin
       << " < " << min_overlap_singular_value << "; refine the loop grid";
    throw Error(ErrorKind::grid_too_coarse, os.str());
  }
  return m;
}

inline void finish(FramePath& path) {
  path.closure_defect = frobenius_norm(path.frames.back().matrix() - path.frames.front().matrix());
}

// F <- F polar(F^dagger G): the element of span(F) closest to G, so that G^dagger F is Hermitian positive.
inline Frame align_to(const Frame& f, const Frame& previous) {
  const ComplexMatrix u = linalg::polar_unitary(linalg::overlap_matrix(f, previous));
  return Frame(f.matrix() * u, 1e-8);
}

}  // namespace detail

/// Sample a loop of frames. Closed-form samplers pass through unchanged; eigensolver
/// samplers are realigned so that every consecutive overlap is Hermitian positive.
inline FramePath sample_frames(const FrameSampler& source, const std::vector<double>& grid,
                               FrameSource kind = FrameSource::closed_form,
                               ClosureMode closure = ClosureMode::last_interval) {
  if (grid.size() < 3) throw Error(ErrorKind::grid_too_coarse, "a loop needs at least 3 grid points");
  FramePath path;
  path.grid = grid;
  path.frames.reserve(grid.size());
  for (double s : grid) {
    Frame f = source(s);
    if (!path.frames.empty()) {
      const Frame& first = path.frames.front();
      if (f.dim() != first.dim()) throw Error(ErrorKind::dimension_mismatch, "frame dimension changes along the loop");
      if (f.count() != first.count()) {
        std::ostringstream os;
        os << "subspace rank changes from " << first.count() << " to " << f.count() << " at s = " << s;
        throw Error(ErrorKind::degeneracy_split, os.str());
      }
    }
    path.frames.push_back(std::move(f));
  }

  if (kind == FrameSource::eigensolver) {
    const std::size_t m = path.intervals();
    for (std::size_t k = 1; k <= m; ++k) {
      detail::checked_overlap(path, k - 1);
      path.frames[k] = detail::align_to(path.frames[k], path.frames[k - 1]);
    }
    // The transported end frame spans the start subspace: F_M = F_0 U with U the holonomy.
    const ComplexMatrix u = linalg::polar_unitary(linalg::overlap_matrix(path.frames.front(), path.frames.back()));
    if (closure == ClosureMode::last_interval) {
      path.frames.back() = path.frames.front();
    } else {
      const ComplexMatrix log_u = linalg::matrix_log_unitary(u, linalg::BranchPolicy::permit);
      for (std::size_t k = 1; k < m; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(m);
        path.frames[k] = Frame(path.frames[k].matrix() * linalg::unitary_exp(-frac * log_u), 1e-8);
      }
      path.frames.back() = path.frames.front();
    }
  }
  for (std::size_t k = 0; k + 1 < path.frames.size(); ++k) detail::checked_overlap(path, k);
  detail::finish(path);
  return path;
}

/// Gauge-ambiguous sampler: the level-th degenerate eigen-group (ascending) of family(s).
/// Every group must keep its multiplicity; a change raises degeneracy_split.
inline FrameSampler eigenframe_sampler(const OperatorFamily& family, std::size_t level,
                                       double degeneracy_tol = linalg::default_degeneracy_tolerance) {
  const auto start = linalg::group_degenerate(linalg::eigh(family(0.0)).values, degeneracy_tol);
  if (level >= start.size()) throw Error(ErrorKind::invalid_parameter, "level index beyond the spectrum");
  const std::size_t groups = start.size();
  const std::size_t rank = start[level].size();
  return [family, level, degeneracy_tol, groups, rank](double s) {
    const linalg::EigenSystem es = linalg::eigh(family(s));
    const auto g = linalg::group_degenerate(es.values, degeneracy_tol);
    if (g.size() != groups || g[level].size() != rank) {
      std::ostringstream os;
      os << "eigen-group structure changes at s = " << s;
      throw Error(ErrorKind::degeneracy_split, os.str());
    }
    return Frame(es.vectors.matrix().columns(g[level].front(), rank));
  };
}

/// omega_k = log polar(F_k^dagger F_{k+1}), one skew-Hermitian N x N matrix per interval.
inline std::vector<ComplexMatrix> connection_samples(const FramePath& path) {
  std::vector<ComplexMatrix> out;
  out.reserve(path.intervals());
  for (std::size_t k = 0; k < path.intervals(); ++k) {
    const ComplexMatrix u = linalg::polar_unitary(detail::checked_overlap(path, k));
    try {
      out.push_back(linalg::matrix_log_unitary(u));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::branch_ambiguity) throw;
      std::ostringstream os;
      os << "interval " << k << " rotates by nearly pi; refine the loop grid (" << e.what() << ")";
      throw Error(ErrorKind::grid_too_coarse, os.str());
    }
  }
  return out;
}

/// Gamma = i sum_k omega_k.
inline ComplexMatrix phase_matrix(const std::vector<ComplexMatrix>& samples) {
  if (samples.empty()) throw Error(ErrorKind::invalid_parameter, "phase_matrix needs at least one sample");
  ComplexMatrix sum(samples.front().rows(), samples.front().cols());
  for (const ComplexMatrix& w : samples) sum += w;
  return hermitian_part(I_unit * sum);
}

/// W = polar(M_0 M_1 ... M_{M-1}), multiplied in loop order.
inline ComplexMatrix wilson_loop(const FramePath& path) {
  ComplexMatrix prod = ComplexMatrix::identity(path.rank());
  for (std::size_t k = 0; k < path.intervals(); ++k) {
    prod = prod * detail::checked_overlap(path, k);
    // Rescale so that long products of slightly contracting overlaps stay well scaled.
    if (k % 64 == 63) prod = (std::sqrt(static_cast<double>(path.rank())) / frobenius_norm(prod)) * prod;
  }
  try {
    return linalg::polar_unitary(prod);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::rank_deficiency) throw;
    throw Error(ErrorKind::grid_too_coarse, std::string("overlap product became singular: ") + e.what());
  }
}

/// F'(s_k) = F(s_k) g_k with g unitary at every sample and g_M = g_0.
inline FramePath gauge_transform(const FramePath& path, const std::vector<ComplexMatrix>& g) {
  if (g.size() != path.frames.size())
    throw Error(ErrorKind::invalid_gauge, "gauge needs one unitary per grid point");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k].rows() != path.rank() || g[k].cols() != path.rank())
      throw Error(ErrorKind::invalid_gauge, "gauge matrix has the wrong size");
    if (unitarity_defect(g[k]) > unitary_tolerance) {
      std::ostringstream os;
      os << "gauge matrix at sample " << k << " is not unitary";
      throw Error(ErrorKind::invalid_gauge, os.str());
    }
  }
  if (frobenius_norm(g.back() - g.front()) > unitary_tolerance)
    throw Error(ErrorKind::invalid_gauge, "gauge is not end-matched: g(s_M) != g(s_0)");
  FramePath out;
  out.grid = path.grid;
  out.frames.reserve(path.frames.size());
  for (std::size_t k = 0; k < g.size(); ++k) out.frames.emplace_back(path.frames[k].matrix() * g[k], 1e-8);
  detail::finish(out);
  return out;
}

/// Abelian phase of a single-column path in [0, 2 pi). The sum of interval phases and the
/// phase of the overlap product are both formed and must agree.
inline double berry_phase(const FramePath& path) {
  if (path.rank() != 1) throw Error(ErrorKind::misuse, "berry_phase needs a single-column path");
  double sum = 0.0;
  Complex product = 1.0;
  for (std::size_t k = 0; k < path.intervals(); ++k) {
    const Complex z = detail::checked_overlap(path, k)(0, 0);
    sum += std::arg(z);
    product *= z / std::abs(z);
  }
  const double from_sum = wrap_phase(-sum);
  const double from_product = wrap_phase(-std::arg(product));
  if (phase_distance(from_sum, from_product) > 1e-9) {
    std::ostringstream os;
    os << "berry phase estimators disagree: " << from_sum << " vs " << from_product;
    throw Error(ErrorKind::branch_ambiguity, os.str());
  }
  return from_sum;
}

/// Largest circular distance between the eigenvalue phases of two Wilson loops.
inline double wilson_spectrum_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return linalg::spectrum_distance(linalg::unitary_eigenphases(a), linalg::unitary_eigenphases(b));
}

inline HolonomyReport report(const FramePath& path) {
  HolonomyReport r;
  r.phase_matrix = phase_matrix(connection_samples(path));
  r.wilson_unitary = wilson_loop(path);
  if (path.rank() == 1) r.abelian_phase = berry_phase(path);
  r.grid_size = path.intervals();
  return r;
}

/// Report over a uniform loop of `intervals` steps, with a convergence estimate from half the steps.
inline HolonomyReport report(const FrameSampler& source, double period, std::size_t intervals = default_loop_points,
                             FrameSource kind = FrameSource::closed_form) {
  HolonomyReport r = report(sample_frames(source, loop_grid(period, intervals), kind));
  const HolonomyReport coarse = report(sample_frames(source, loop_grid(period, intervals / 2), kind));
  r.convergence_estimate = frobenius_norm(r.phase_matrix - coarse.phase_matrix);
  return r;
}

/// Smooth end-matched gauge g_k = exp(i sum_{m=1..harmonics} (A_m cos(2 pi m k / M) + B_m sin(2 pi m k / M)))
/// with random Hermitian A_m, B_m whose entries have scale `amplitude`.
inline std::vector<ComplexMatrix> smooth_random_gauge(std::size_t rank, std::size_t intervals, std::mt19937_64& rng,
                                                      std::size_t harmonics = 3, double amplitude = 1.5) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  auto random_hermitian = [&]() {
    ComplexMatrix h(rank, rank);
    for (std::size_t i = 0; i < rank; ++i) {
      h(i, i) = u(rng);
      for (std::size_t j = i + 1; j < rank; ++j) {
        h(i, j) = Complex(u(rng), u(rng)) * 0.5;
        h(j, i) = std::conj(h(i, j));
      }
    }
    return h;
  };
  std::vector<ComplexMatrix> a, b;
  for (std::size_t m = 0; m < harmonics; ++m) {
    a.push_back(random_hermitian());
    b.push_back(random_hermitian());
  }
  std::vector<ComplexMatrix> g(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const std::size_t kk = k % intervals;
    ComplexMatrix h(rank, rank);
    for (std::size_t m = 0; m < harmonics; ++m) {
      const double arg = two_pi * static_cast<double>((m + 1) * kk) / static_cast<double>(intervals);
      h += std::cos(arg) * a[m] + std::sin(arg) * b[m];
    }
    g[k] = linalg::unitary_exp(I_unit * h);
  }
  return g;
}

}  // namespace holonomy
}  // namespace geophase
