#pragma once

// Model zoo. Units: hbar = 1; every frequency is supplied directly as a rate.
//
//   spin-1/2 in a static field     H = (omega_s / 2) sigma_z
//   ring, static crown field       per angular-momentum block n, in the basis
//                                  (|xi_n+>, |xi_n->) of the field-aligned spinors
//   ring, rotating crown field     per block n, in the bare spinor basis (a, b)
//                                  of e^{i n phi} (a, e^{i phi} b)
//   ring action operator           A(vartheta) per block, bare spinor basis
//
// Ring parameters enter through the coupling epsilon, the field tilt chi and
// the frequency scale Omega; Delta = epsilon cos(chi), g = 1 - epsilon sin(chi)
// and tan(2 Theta) = Delta / g.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geophase/error.hpp"
#include "geophase/linalg.hpp"
#include "geophase/torus.hpp"

namespace geophase {

using MatrixSampler = std::function<ComplexMatrix(double)>;
using FrameSampler = std::function<Frame(double)>;

/// Periodic family t -> Hermitian matrix, t in [0, period].
class OperatorFamily {
 public:
  OperatorFamily(std::size_t dim, double period, MatrixSampler sampler)
      : dim_(dim), period_(period), sampler_(std::move(sampler)) {
    if (dim_ == 0) throw Error(ErrorKind::invalid_parameter, "operator family of dimension 0");
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw Error(ErrorKind::invalid_parameter, "operator family period must be positive and finite");
    const ComplexMatrix start = (*this)(0.0);
    const ComplexMatrix end = (*this)(period_);
    const double gap = frobenius_norm(start - end);
    if (gap > 1e-10 * std::max(1.0, frobenius_norm(start))) {
      std::ostringstream os;
      os << "family is not periodic: ||S(0) - S(T)||_F = " << gap;
      throw Error(ErrorKind::invalid_parameter, os.str());
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  double period() const noexcept { return period_; }

  ComplexMatrix operator()(double t) const {
    ComplexMatrix m = sampler_(t);
    if (m.rows() != dim_ || m.cols() != dim_)
      throw Error(ErrorKind::dimension_mismatch, "operator family sampler returned the wrong shape");
    if (!all_finite(m) || hermiticity_defect(m) > hermitian_tolerance * std::max(1.0, frobenius_norm(m))) {
      std::ostringstream os;
      os << "operator family sample at t = " << t << " is not Hermitian";
      throw Error(ErrorKind::symmetry_violation, os.str());
    }
    return m;
  }

 private:
  std::size_t dim_;
  double period_;
  MatrixSampler sampler_;
};

/// Closed-form values a numerical route is compared against. Phases are stored in [0, 2 pi).
struct AnalyticReference {
  std::map<std::string, double> phases;
  std::optional<ComplexMatrix> phase_matrix;
  std::map<std::string, FrameSampler> frames;
};

struct SpinModelParams {
  double omega_s = 1.0;  // 2 mu_B B
  double theta = pi / 6;

  void validate() const {
    if (!(omega_s > 0.0) || !std::isfinite(omega_s))
      throw Error(ErrorKind::invalid_parameter, "omega_s must be positive");
    if (!(theta >= 0.0 && theta <= pi / 2)) throw Error(ErrorKind::invalid_parameter, "theta must lie in [0, pi/2]");
  }
};

struct RingModelParams {
  double epsilon = 0.5;  // mu_B E a
  double chi = pi / 3;
  double Omega = 1.0;    // 1 / (2 m a^2)
  std::vector<int> n_levels{0};
  double theta = pi / 6;           // shared mixing angle theta_n
  std::map<int, double> theta_n;   // per-level overrides
  double omega_o = 0.0;            // field rotation rate; 0 for the static field
  std::map<int, double> I_n;       // per-level invariant offsets; default 4 n

  double delta() const { return epsilon * std::cos(chi); }
  double g() const { return 1.0 - epsilon * std::sin(chi); }
  double rho() const { return std::hypot(delta(), g()); }
  /// Theta = atan2(Delta, g) / 2, so 2 Theta lies in (-pi, pi].
  double big_theta() const { return 0.5 * std::atan2(delta(), g()); }
  double omega_ns(int n) const { return Omega * (n + 0.5) * rho(); }

  double mixing_angle(int n) const {
    const auto it = theta_n.find(n);
    return it == theta_n.end() ? theta : it->second;
  }
  double invariant_offset(int n) const {
    const auto it = I_n.find(n);
    return it == I_n.end() ? 4.0 * n : it->second;
  }

  void validate() const {
    for (double v : {epsilon, chi, Omega, theta, omega_o})
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_parameter, "ring parameters must be finite");
    const double d = delta();
    const double gg = g();
    if (d * d + gg * gg <= 1e-12) {
      std::ostringstream os;
      os << "Delta^2 + g^2 = " << d * d + gg * gg << " vanishes (epsilon = " << epsilon << ", chi = " << chi
         << "); Theta is undefined";
      throw Error(ErrorKind::degenerate_theta, os.str());
    }
    if (!(Omega > 0.0)) throw Error(ErrorKind::invalid_parameter, "Omega must be positive");
    if (n_levels.empty()) throw Error(ErrorKind::invalid_parameter, "n_levels is empty");
    std::set<int> seen;
    for (int n : n_levels) {
      if (n < 0) throw Error(ErrorKind::invalid_parameter, "angular-momentum indices must be >= 0");
      if (!seen.insert(n).second) throw Error(ErrorKind::invalid_parameter, "duplicate angular-momentum index");
      const double th = mixing_angle(n);
      if (!(th >= 0.0 && th <= pi / 2)) throw Error(ErrorKind::invalid_parameter, "theta_n must lie in [0, pi/2]");
    }
    std::vector<double> eig;
    for (int n : n_levels) {
      eig.push_back(invariant_offset(n) + 1.0);
      eig.push_back(invariant_offset(n) - 1.0);
    }
    std::sort(eig.begin(), eig.end());
    for (std::size_t i = 1; i < eig.size(); ++i)
      if (eig[i] - eig[i - 1] < 1e-8)
        throw Error(ErrorKind::invalid_parameter, "invariant offsets I_n make the levels I_n +/- 1 degenerate");
  }
};

namespace models {

namespace detail {

inline ComplexMatrix outer(const Ket& a, const Ket& b) {
  ComplexMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

// e^{i omega t} evaluated through the phase fraction so that t = T lands exactly on 1.
inline Complex winding(double omega, double t, double period) {
  const double frac = t / period;
  const double turns = frac - std::floor(frac);
  return std::polar(1.0, std::copysign(two_pi * turns, omega));
}

// Two-level precession frames shared by the spin and static-ring models:
//   phi_+(t) = ( cos th, e^{+i w t} sin th ),   phi_-(t) = ( e^{-i w t} sin th, -cos th ).
inline Ket precession_ket(int sign, double theta, double omega, double t, double period) {
  const Complex w = winding(omega, t, period);
  if (sign > 0) return {std::cos(theta), w * std::sin(theta)};
  return {std::conj(w) * std::sin(theta), -std::cos(theta)};
}

inline double precession_phase(int sign, double theta) {
  return wrap_phase(pi * (1.0 + sign * std::cos(2.0 * theta)));
}

}  // namespace detail

// ---- spin-1/2 -------------------------------------------------------------

struct SpinModel {
  SpinModelParams params;
  double period;
  OperatorFamily hamiltonian;
  OperatorFamily invariant;
  AnalyticReference reference;

  /// psi_+(0) = cos(th)|xi_+> + sin(th)|xi_->,  psi_-(0) = sin(th)|xi_+> - cos(th)|xi_->.
  Ket initial_state(int sign) const { return detail::precession_ket(sign, params.theta, params.omega_s, 0.0, period); }
};

inline SpinModel spin_half(const SpinModelParams& params) {
  params.validate();
  const double w = params.omega_s;
  const double th = params.theta;
  const double period = two_pi / w;

  OperatorFamily h(2, period, [w](double) { return (0.5 * w) * pauli_z(); });
  OperatorFamily inv(2, period, [w, th](double t) {
    return std::sin(2 * th) * std::cos(w * t) * pauli_x() + std::sin(2 * th) * std::sin(w * t) * pauli_y() +
           std::cos(2 * th) * pauli_z();
  });

  AnalyticReference ref;
  ref.phases["gamma+"] = detail::precession_phase(+1, th);
  ref.phases["gamma-"] = detail::precession_phase(-1, th);
  for (int sign : {+1, -1})
    ref.frames[sign > 0 ? "phi+" : "phi-"] = [=](double t) {
      return Frame::from_ket(detail::precession_ket(sign, th, w, t, period));
    };
  return SpinModel{params, period, std::move(h), std::move(inv), std::move(ref)};
}

// ---- ring, shared pieces -------------------------------------------------------

/// Columns: bare-spinor coordinates (a, b) of |xi_n+> = (cos Th, sin Th) and |xi_n-> = (-sin Th, cos Th).
inline ComplexMatrix ring_spinor_basis(const RingModelParams& p) {
  const double th = p.big_theta();
  return ComplexMatrix(2, 2, {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)});
}

/// -i d/dphi + s_{phi - vartheta} restricted to block n, bare spinor basis:
/// (n + 1/2) I - (g sigma_z + Delta (cos vartheta sigma_x - sin vartheta sigma_y)) / 2.
inline ComplexMatrix ring_kinetic_block(const RingModelParams& p, int n, double vartheta) {
  const ComplexMatrix field = p.g() * pauli_z() + p.delta() * (std::cos(vartheta) * pauli_x() -
                                                               std::sin(vartheta) * pauli_y());
  return (n + 0.5) * ComplexMatrix::identity(2) - 0.5 * field;
}

// ---- ring, static field ---------------------------------------------------------

struct RingStaticBlock {
  int n;
  double theta_n;
  double omega_ns;
  double period;  // 2 pi / Omega_ns
  OperatorFamily hamiltonian;
  OperatorFamily invariant;
  AnalyticReference reference;

  Ket initial_state(int sign) const { return detail::precession_ket(sign, theta_n, omega_ns, 0.0, period); }
};

struct RingStaticModel {
  RingModelParams params;
  std::vector<RingStaticBlock> blocks;

  const RingStaticBlock& block(int n) const {
    for (const auto& b : blocks)
      if (b.n == n) return b;
    throw Error(ErrorKind::invalid_parameter, "no block for n = " + std::to_string(n));
  }
};

/// Per block n, in the basis (|xi_n+>, |xi_n->):
///   H_n = E_n I + (Omega_ns / 2) sigma_z,   E_n = Omega ((n + 1/2)^2 + (Delta^2 + g^2) / 4),
///   I_n(t) = (I_n + 1)|phi_n+><phi_n+| + (I_n - 1)|phi_n-><phi_n-|,
/// where |phi_n+/-(t)> precess at Omega_ns. The splitting Omega_ns makes these
/// frames exact solutions up to a phase, so I_n(t) satisfies the invariant condition.
inline RingStaticModel ring_static(const RingModelParams& params) {
  params.validate();
  if (params.omega_o != 0.0)
    throw Error(ErrorKind::misuse, "ring_static needs omega_o = 0; use ring_rotating for a rotating field");
  RingStaticModel model{params, {}};
  const double rho2 = params.rho() * params.rho();
  for (int n : params.n_levels) {
    const double wn = params.omega_ns(n);
    const double period = two_pi / std::abs(wn);
    const double th = params.mixing_angle(n);
    const double offset = params.invariant_offset(n);
    const double mean = params.Omega * ((n + 0.5) * (n + 0.5) + 0.25 * rho2);

    OperatorFamily h(2, period, [mean, wn](double) {
      return mean * ComplexMatrix::identity(2) + (0.5 * wn) * pauli_z();
    });
    OperatorFamily inv(2, period, [=](double t) {
      const Ket up = detail::precession_ket(+1, th, wn, t, period);
      const Ket dn = detail::precession_ket(-1, th, wn, t, period);
      return hermitian_part((offset + 1.0) * detail::outer(up, up) + (offset - 1.0) * detail::outer(dn, dn));
    });

    AnalyticReference ref;
    ref.phases["gamma+"] = detail::precession_phase(+1, th);
    ref.phases["gamma-"] = detail::precession_phase(-1, th);
    for (int sign : {+1, -1})
      ref.frames[sign > 0 ? "phi+" : "phi-"] = [=](double t) {
        return Frame::from_ket(detail::precession_ket(sign, th, wn, t, period));
      };
    model.blocks.push_back(RingStaticBlock{n, th, wn, period, std::move(h), std::move(inv), std::move(ref)});
  }
  return model;
}

// ---- ring, rotating field ----------------------------------------------------

/// Gamma = [[pi (1 - cos 2Th), pi sin 2Th], [pi sin 2Th, pi (1 + cos 2Th)]]
inline ComplexMatrix rotating_ring_phase_matrix(double big_theta) {
  const double c = std::cos(2 * big_theta);
  const double s = std::sin(2 * big_theta);
  return ComplexMatrix(2, 2, {pi * (1 - c), pi * s, pi * s, pi * (1 + c)});
}

struct RingRotatingBlock {
  int n;
  double period;  // 2 pi / |omega_o|
  OperatorFamily hamiltonian;  // Omega K(omega_o t)^2
  OperatorFamily invariant;    // J = -i d/dphi + sigma_z / 2 = (n + 1/2) I on the block
  FrameSampler frames;         // (|xi'_n+(t)>, |xi'_n-(t)>)
  AnalyticReference reference;
};

struct RingRotatingModel {
  RingModelParams params;
  std::vector<RingRotatingBlock> blocks;
};

/// |xi'_n+(t)> = (cos Th, e^{-i omega_o t} sin Th),  |xi'_n-(t)> = (-sin Th, e^{-i omega_o t} cos Th).
inline ComplexMatrix rotating_ring_frame_matrix(double big_theta, Complex lower_phase) {
  const double c = std::cos(big_theta);
  const double s = std::sin(big_theta);
  return ComplexMatrix(2, 2, {c, -s, lower_phase * s, lower_phase * c});
}

inline RingRotatingModel ring_rotating(const RingModelParams& params) {
  params.validate();
  if (params.omega_o == 0.0)
    throw Error(ErrorKind::misuse, "ring_rotating needs omega_o != 0; use ring_static for a static field");
  RingRotatingModel model{params, {}};
  const double wo = params.omega_o;
  const double period = two_pi / std::abs(wo);
  const double big_theta = params.big_theta();
  const double omega = params.Omega;
  for (int n : params.n_levels) {
    OperatorFamily h(2, period, [params, n, omega, wo, period](double t) {
      const double angle = two_pi * (t / period) * (wo > 0 ? 1.0 : -1.0);
      const ComplexMatrix k = ring_kinetic_block(params, n, angle);
      return hermitian_part(omega * (k * k));
    });
    OperatorFamily j(2, period, [n](double) { return (n + 0.5) * ComplexMatrix::identity(2); });
    FrameSampler frames = [big_theta, wo, period](double t) {
      return Frame(rotating_ring_frame_matrix(big_theta, std::conj(detail::winding(wo, t, period))));
    };
    AnalyticReference ref;
    ref.phase_matrix = (wo > 0 ? 1.0 : -1.0) * rotating_ring_phase_matrix(big_theta);
    ref.frames["xi'"] = frames;
    model.blocks.push_back(RingRotatingBlock{n, period, std::move(h), std::move(j), frames, std::move(ref)});
  }
  return model;
}

// ---- ring action operator ---------------------------------------------------------

struct RingActionBlock {
  int n;
  OperatorFamily action;  // A(vartheta), period 2 pi
  std::function<TorusSample(double)> eigenfunction_plus;   // xi'_n+(vartheta, phi)
  std::function<TorusSample(double)> eigenfunction_minus;  // xi'_n-(vartheta, phi)
  double eigenvalue_plus;   // eigenvalue of A carried by xi'_n+
  double eigenvalue_minus;  // eigenvalue of A carried by xi'_n-
  AnalyticReference reference;
};

struct RingActionModel {
  RingModelParams params;
  std::size_t phi_points;
  std::vector<RingActionBlock> blocks;
};

/// xi'_n+/-(vartheta, phi) = e^{i n phi} (cos Th, e^{i(phi - vartheta)} sin Th) and
/// e^{i n phi} (-sin Th, e^{i(phi - vartheta)} cos Th), sampled on a uniform phi grid.
inline TorusSample ring_action_eigenfunction(int sign, int n, double big_theta, double vartheta,
                                             std::size_t phi_points) {
  const double c = std::cos(big_theta);
  const double s = std::sin(big_theta);
  return sample_torus(1, phi_points, 2, [=](const std::vector<double>& angle) {
    const double phi = angle[0];
    const Complex carrier = std::polar(1.0, n * phi);
    const Complex lower = std::polar(1.0, phi - vartheta);
    if (sign > 0) return std::vector<Complex>{carrier * c, carrier * lower * s};
    return std::vector<Complex>{-carrier * s, carrier * lower * c};
  });
}

inline RingActionModel ring_action(const RingModelParams& params, std::size_t phi_points = 64) {
  params.validate();
  if (phi_points < 4) throw Error(ErrorKind::invalid_parameter, "need at least 4 phi points");
  RingActionModel model{params, phi_points, {}};
  const double big_theta = params.big_theta();
  const double rho = params.rho();
  for (int n : params.n_levels) {
    OperatorFamily a(2, two_pi, [params, n](double vt) { return ring_kinetic_block(params, n, vt); });
    AnalyticReference ref;
    ref.phases["gamma+"] = wrap_phase(pi * (1.0 - std::cos(2 * big_theta)));
    ref.phases["gamma-"] = wrap_phase(pi * (1.0 + std::cos(2 * big_theta)));
    model.blocks.push_back(RingActionBlock{
        n, std::move(a),
        [=](double vt) { return ring_action_eigenfunction(+1, n, big_theta, vt, phi_points); },
        [=](double vt) { return ring_action_eigenfunction(-1, n, big_theta, vt, phi_points); },
        n + 0.5 * (1.0 - rho), n + 0.5 * (1.0 + rho), std::move(ref)});
  }
  return model;
}

}  // namespace models
}  // namespace geophase
