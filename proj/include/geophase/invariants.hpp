#pragma once

// Checks of the invariant-operator condition dI/dt - i[I, H] = 0 (hbar = 1) and of
// its consequences: constant eigenvalues, eigenspaces carried along by the evolution,
// and constant weights of a state on those eigenspaces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/evolution.hpp"
#include "geophase/linalg.hpp"
#include "geophase/models.hpp"

namespace geophase {

struct InvarianceReport {
  double max_residual = 0.0;
  double eigenvalue_drift = 0.0;
  double transport_error = 0.0;
  std::vector<double> sample_times;
};

struct GroupWeight {
  double eigenvalue = 0.0;  // mean eigenvalue of the group
  std::size_t multiplicity = 0;
  double weight = 0.0;      // ||P_group psi||^2
};

namespace invariants {

inline constexpr double derivative_step = 1e-6;  // relative to the period

/// n uniform times t_j = j T / n, j = 0..n-1.
inline std::vector<double> uniform_times(double period, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = period * static_cast<double>(j) / static_cast<double>(n);
  return t;
}

/// max_t ||dI/dt - i[I, H]||_F with a central difference of half-step 1e-6 T.
inline double invariance_residual(const OperatorFamily& inv, const OperatorFamily& h, const std::vector<double>& times) {
  if (inv.dim() != h.dim()) throw Error(ErrorKind::dimension_mismatch, "invariant and Hamiltonian differ in size");
  const double step = derivative_step * inv.period();
  double worst = 0.0;
  for (double t : times) {
    const ComplexMatrix d = (1.0 / (2.0 * step)) * (inv(t + step) - inv(t - step));
    worst = std::max(worst, frobenius_norm(d - I_unit * commutator(inv(t), h(t))));
  }
  return worst;
}

inline double eigenvalue_drift(const OperatorFamily& inv, const std::vector<double>& times) {
  if (times.empty()) throw Error(ErrorKind::invalid_parameter, "eigenvalue_drift needs sample times");
  const std::vector<double> base = linalg::eigh(inv(0.0)).values;
  double worst = 0.0;
  for (double t : times) {
    const std::vector<double> now = linalg::eigh(inv(t)).values;
    for (std::size_t k = 0; k < base.size(); ++k) worst = std::max(worst, std::abs(now[k] - base[k]));
  }
  return worst;
}

namespace detail {

struct LevelGroup {
  double eigenvalue;
  Frame frame;
};

inline std::vector<LevelGroup> eigen_groups(const ComplexMatrix& m, double tol) {
  const linalg::EigenSystem es = linalg::eigh(m);
  std::vector<LevelGroup> out;
  for (const auto& g : linalg::group_degenerate(es.values, tol)) {
    double mean = 0.0;
    for (std::size_t i : g) mean += es.values[i];
    out.push_back({mean / static_cast<double>(g.size()), Frame(es.vectors.matrix().columns(g.front(), g.size()))});
  }
  return out;
}

}  // namespace detail

/// Evolve the level-th eigenspace of I(0) (levels counted over degenerate groups, ascending)
/// and return max_k ||(1 - P(t_k)) psi_r(t_k)|| over every step and every column r, where P(t)
/// projects onto the I(t)-eigenspace with the same eigenvalue.
inline double transport_error(const OperatorFamily& inv, const OperatorFamily& h, std::size_t level,
                              std::size_t steps = default_steps,
                              double degeneracy_tol = linalg::default_degeneracy_tolerance) {
  if (inv.dim() != h.dim()) throw Error(ErrorKind::dimension_mismatch, "invariant and Hamiltonian differ in size");
  const auto start = detail::eigen_groups(inv(0.0), degeneracy_tol);
  if (level >= start.size()) throw Error(ErrorKind::invalid_parameter, "level index beyond the invariant's spectrum");
  const double lambda = start[level].eigenvalue;
  const Frame& f0 = start[level].frame;

  const Trajectory tr = evolve(h, f0.column(0), steps);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.grid.size(); ++k) {
    const auto groups = detail::eigen_groups(inv(tr.grid[k]), degeneracy_tol);
    if (groups.size() != start.size() || groups[level].frame.count() != f0.count() ||
        std::abs(groups[level].eigenvalue - lambda) > 1e-6 * std::max(1.0, std::abs(lambda))) {
      std::ostringstream os;
      os << "invariant eigenvalues cross or split near t = " << tr.grid[k] << "; level " << level
         << " cannot be tracked";
      throw Error(ErrorKind::tracking_ambiguity, os.str());
    }
    const ComplexMatrix moved = tr.propagators[k] * f0.matrix();
    const ComplexMatrix proj = groups[level].frame.projector();
    const ComplexMatrix leak = moved - proj * moved;
    for (std::size_t r = 0; r < f0.count(); ++r) worst = std::max(worst, norm(leak.column(r)));
  }
  return worst;
}

/// Squared norms of psi on each degenerate eigen-group of I0, ascending in eigenvalue.
inline std::vector<GroupWeight> decompose_state(const Ket& psi, const ComplexMatrix& inv0,
                                                double tol = linalg::default_degeneracy_tolerance) {
  if (psi.size() != inv0.rows()) throw Error(ErrorKind::dimension_mismatch, "state does not match the invariant");
  if (std::abs(norm(psi) - 1.0) > 1e-8) throw Error(ErrorKind::not_normalized, "decompose_state needs a unit state");
  std::vector<GroupWeight> out;
  for (const auto& g : detail::eigen_groups(inv0, tol)) {
    double w = 0.0;
    for (std::size_t r = 0; r < g.frame.count(); ++r) w += std::norm(inner(g.frame.column(r), psi));
    out.push_back({g.eigenvalue, g.frame.count(), w});
  }
  return out;
}

/// All three checks over `samples` uniform times of the invariant's period.
inline InvarianceReport check_invariant(const OperatorFamily& inv, const OperatorFamily& h, std::size_t samples = 100,
                                        std::size_t steps = default_steps) {
  InvarianceReport r;
  r.sample_times = uniform_times(inv.period(), samples);
  r.max_residual = invariance_residual(inv, h, r.sample_times);
  r.eigenvalue_drift = eigenvalue_drift(inv, r.sample_times);
  const std::size_t levels = detail::eigen_groups(inv(0.0), linalg::default_degeneracy_tolerance).size();
  for (std::size_t level = 0; level < levels; ++level)
    r.transport_error = std::max(r.transport_error, transport_error(inv, h, level, steps));
  return r;
}

}  // namespace invariants
}  // namespace geophase
