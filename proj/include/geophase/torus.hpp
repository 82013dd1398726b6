#pragma once

// Sampled wavefunctions on a uniform grid of an n-torus of angle variables.

#include <cstddef>
#include <functional>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/linalg.hpp"

namespace geophase {

/// Wavefunction on a uniform grid of the n-torus at one parameter value.
/// values are laid out point-major: values[point * components + c], with
/// points flattened row-major over the angle dimensions.
struct TorusSample {
  std::size_t n_angles = 1;
  std::size_t points_per_dim = 0;
  std::size_t components = 1;
  std::vector<Complex> values;

  std::size_t point_count() const {
    std::size_t p = 1;
    for (std::size_t d = 0; d < n_angles; ++d) p *= points_per_dim;
    return p;
  }

  bool same_grid(const TorusSample& o) const {
    return n_angles == o.n_angles && points_per_dim == o.points_per_dim && components == o.components &&
           values.size() == o.values.size();
  }

  /// Angle of grid point `index` along each dimension.
  std::vector<double> angles(std::size_t index) const {
    std::vector<double> a(n_angles);
    for (std::size_t d = n_angles; d-- > 0;) {
      a[d] = two_pi * static_cast<double>(index % points_per_dim) / static_cast<double>(points_per_dim);
      index /= points_per_dim;
    }
    return a;
  }
};

/// Build a sample by evaluating `f(angles)` (returning `components` amplitudes) at every grid point.
inline TorusSample sample_torus(std::size_t n_angles, std::size_t points_per_dim, std::size_t components,
                                const std::function<std::vector<Complex>(const std::vector<double>&)>& f) {
  if (n_angles == 0 || points_per_dim == 0 || components == 0)
    throw Error(ErrorKind::invalid_parameter, "torus grid needs positive dimensions");
  TorusSample s{n_angles, points_per_dim, components, {}};
  const std::size_t points = s.point_count();
  s.values.reserve(points * components);
  for (std::size_t p = 0; p < points; ++p) {
    const auto v = f(s.angles(p));
    if (v.size() != components) throw Error(ErrorKind::dimension_mismatch, "torus sampler returned wrong spinor size");
    s.values.insert(s.values.end(), v.begin(), v.end());
  }
  return s;
}

/// Wavefunction family over a closed parameter loop.
struct TorusWavefunction {
  std::vector<double> loop_grid;       // R_0 ... R_M, R_M closing the loop
  std::vector<TorusSample> samples;    // one per loop_grid entry
};

}  // namespace geophase
