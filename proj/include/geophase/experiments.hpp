#pragma once

// Config-driven experiments behind the command-line tool.
//
// A config is a flat text file of `key = value` lines. `[section]` headers and
// comments (`#` or `;`) are allowed; sections only group keys for the reader.
// Angles accept a `pi` suffix: `theta = 0.25pi`, `chi = pi/3`, `chi = -2pi`.
// Per-level values use dotted keys: `theta_n.1 = 0.25pi`, `I_n.2 = 10`.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geophase/action.hpp"
#include "geophase/error.hpp"
#include "geophase/evolution.hpp"
#include "geophase/holonomy.hpp"
#include "geophase/models.hpp"
#include "geophase/ring_state.hpp"

namespace geophase::experiments {

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string anchor;
};

/// Stable ordering; `run` accepts exactly these names.
inline const std::vector<CatalogEntry>& list_experiments() {
  static const std::vector<CatalogEntry> catalog{
      {"spin", "spin-1/2 in a static field: Berry phases of the invariant eigenstates and the AA split of propagated states",
       "spin-1/2 invariant I(t); gamma+/- = pi(1 +/- cos 2theta)"},
      {"ring-static", "ring in a static crown field: gamma_n+/- per angular-momentum block, holonomy and AA routes",
       "static ring invariant I_n(t); gamma_n+/- = pi(1 +/- cos 2theta_n)"},
      {"ring-rotating", "ring in a rotating crown field: non-Abelian phase matrix Gamma_n and its Wilson loop",
       "rotating ring invariant J; Gamma = pi [[1 - cos 2Theta, sin 2Theta], [sin 2Theta, 1 + cos 2Theta]]"},
      {"ring-action", "action operator of the ring: phases and connection 1-forms over the vartheta loop",
       "action eigenfunctions xi'_n+/-; gamma_n+/- = pi(1 -/+ cos 2Theta)"},
      {"direct-sum", "multi-block ring state: block weights and per-block phases against single-block runs",
       "Gamma = direct sum over n of Gamma_n"},
      {"gauge-sweep", "random smooth gauges: Wilson spectrum invariance for every model path",
       "gauge covariance of the connection; gauge invariance of the Wilson loop spectrum"},
      {"convergence", "deviation ratios over successive halvings of the grid step",
       "second-order convergence of the discrete connection and propagator"},
  };
  return catalog;
}

inline bool is_experiment(const std::string& name) {
  for (const auto& e : list_experiments())
    if (e.name == name) return true;
  return false;
}

struct ExperimentConfig {
  std::string experiment;
  // spin model
  double omega_s = 1.0;
  // ring models (theta is shared with the spin model)
  double theta = pi / 6;
  double epsilon = 0.5;
  double chi = pi / 3;
  double Omega = 1.0;
  std::optional<double> omega_o;  // ring-rotating and gauge-sweep default to 0.1
  std::vector<int> n_levels{0, 1, 2};
  std::map<int, double> theta_n;
  std::map<int, double> I_n;
  // grids
  std::size_t loop_points = default_loop_points;
  std::size_t steps = default_steps;
  std::size_t phi_points = 64;
  std::size_t base_grid = 64;
  std::size_t gauge_trials = 10;
  // tolerances
  double tol = 1e-6;
  double gauge_tol = 1e-8;
  double weight_tol = 1e-10;
  double min_gauge_change = 1e-3;
  double order_ratio = 3.5;
  double cyclicity_threshold = default_cyclicity_threshold;
  // output
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 20261019;

  double rotation_rate() const { return omega_o.value_or(0.1); }

  RingModelParams ring_params(double rate = 0.0) const {
    RingModelParams p;
    p.epsilon = epsilon;
    p.chi = chi;
    p.Omega = Omega;
    p.n_levels = n_levels;
    p.theta = theta;
    p.theta_n = theta_n;
    p.omega_o = rate;
    p.I_n = I_n;
    return p;
  }
};

// ---- parsing -------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::optional<double> parse_real(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// `1.5`, `pi`, `-pi`, `0.25pi`, `2pi/3`, `pi / 6`.
inline std::optional<double> parse_angle(const std::string& text) {
  static const std::regex with_pi(R"(^([+-]?(?:[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)?)\s*\*?\s*pi(?:\s*/\s*([0-9]*\.?[0-9]+))?$)");
  const std::string s = trim(text);
  std::smatch m;
  if (!std::regex_match(s, m, with_pi)) return parse_real(s);
  double factor = 1.0;
  const std::string lead = m[1].str();
  if (lead == "-") factor = -1.0;
  else if (!lead.empty() && lead != "+") factor = std::strtod(lead.c_str(), nullptr);
  double v = factor * pi;
  if (m[2].matched) {
    const double div = std::strtod(m[2].str().c_str(), nullptr);
    if (div == 0.0) return std::nullopt;
    v /= div;
  }
  return v;
}

inline std::optional<std::uint64_t> parse_count(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 19) return std::nullopt;
  return std::stoull(s);
}

inline std::optional<std::vector<int>> parse_levels(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto c = parse_count(item);
    if (!c || *c > 1000000) return std::nullopt;
    out.push_back(static_cast<int>(*c));
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace detail

/// Collects field-level problems and raises them together as one usage error.
class Diagnostics {
 public:
  void add(const std::string& where, const std::string& field, const std::string& problem) {
    lines_.push_back(where + (where.empty() ? "" : ": ") + "field '" + field + "': " + problem);
  }
  bool empty() const { return lines_.empty(); }
  void raise_if_any(ErrorKind kind = ErrorKind::usage) const {
    if (lines_.empty()) return;
    std::string msg = "invalid config";
    for (const auto& l : lines_) msg += "\n  " + l;
    throw Error(kind, msg);
  }

 private:
  std::vector<std::string> lines_;
};

/// Apply one `key = value` assignment. Unknown keys and malformed values are diagnosed, not thrown.
inline void assign(ExperimentConfig& c, const std::string& key, const std::string& value, Diagnostics& diag,
                   const std::string& where = {}) {
  auto real = [&](double& dst) {
    if (auto v = detail::parse_real(value)) dst = *v;
    else diag.add(where, key, "expected a real number, got '" + value + "'");
  };
  auto angle = [&](double& dst) {
    if (auto v = detail::parse_angle(value)) dst = *v;
    else diag.add(where, key, "expected an angle such as 0.25pi or 0.7, got '" + value + "'");
  };
  auto count = [&](std::size_t& dst) {
    if (auto v = detail::parse_count(value)) dst = static_cast<std::size_t>(*v);
    else diag.add(where, key, "expected a non-negative integer, got '" + value + "'");
  };

  if (key == "experiment") c.experiment = detail::trim(value);
  else if (key == "omega_s") real(c.omega_s);
  else if (key == "theta") angle(c.theta);
  else if (key == "epsilon") real(c.epsilon);
  else if (key == "chi") angle(c.chi);
  else if (key == "Omega") real(c.Omega);
  else if (key == "omega_o") {
    if (auto v = detail::parse_real(value)) c.omega_o = *v;
    else diag.add(where, key, "expected a real number, got '" + value + "'");
  } else if (key == "n_levels") {
    if (auto v = detail::parse_levels(value)) c.n_levels = *v;
    else diag.add(where, key, "expected a comma-separated list of integers >= 0, got '" + value + "'");
  } else if (key.rfind("theta_n.", 0) == 0 || key.rfind("I_n.", 0) == 0) {
    const bool is_theta = key[0] == 't';
    const auto level = detail::parse_count(key.substr(key.find('.') + 1));
    if (!level) {
      diag.add(where, key, "level suffix must be an integer >= 0");
      return;
    }
    const auto v = is_theta ? detail::parse_angle(value) : detail::parse_real(value);
    if (!v) diag.add(where, key, "malformed value '" + value + "'");
    else (is_theta ? c.theta_n : c.I_n)[static_cast<int>(*level)] = *v;
  } else if (key == "loop_points") count(c.loop_points);
  else if (key == "steps") count(c.steps);
  else if (key == "phi_points") count(c.phi_points);
  else if (key == "base_grid") count(c.base_grid);
  else if (key == "gauge_trials") count(c.gauge_trials);
  else if (key == "tol") real(c.tol);
  else if (key == "gauge_tol") real(c.gauge_tol);
  else if (key == "weight_tol") real(c.weight_tol);
  else if (key == "min_gauge_change") real(c.min_gauge_change);
  else if (key == "order_ratio") real(c.order_ratio);
  else if (key == "cyclicity_threshold") real(c.cyclicity_threshold);
  else if (key == "format") c.format = detail::trim(value);
  else if (key == "output") c.output = detail::trim(value);
  else if (key == "seed") {
    if (auto v = detail::parse_count(value)) c.seed = *v;
    else diag.add(where, key, "expected a non-negative integer, got '" + value + "'");
  } else diag.add(where, key, "unknown key");
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config") {
  ExperimentConfig c;
  Diagnostics diag;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') diag.add(where, line, "unterminated section header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      diag.add(where, line, "expected 'key = value'");
      continue;
    }
    assign(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), diag, where);
  }
  diag.raise_if_any();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot open config file '" + path + "'");
  return parse_config(in, path);
}

/// Every numeric field checked against the model preconditions before anything runs.
inline void validate(const ExperimentConfig& c) {
  Diagnostics diag;
  if (c.experiment.empty()) diag.add({}, "experiment", "missing");
  else if (!is_experiment(c.experiment)) diag.add({}, "experiment", "unknown experiment '" + c.experiment + "'");
  if (c.format != "json" && c.format != "csv") diag.add({}, "format", "must be json or csv");
  if (!(c.omega_s > 0.0)) diag.add({}, "omega_s", "must be positive");
  if (!(c.Omega > 0.0)) diag.add({}, "Omega", "must be positive");
  if (!(c.theta >= 0.0 && c.theta <= pi / 2)) diag.add({}, "theta", "must lie in [0, pi/2]");
  for (const auto& [n, th] : c.theta_n)
    if (!(th >= 0.0 && th <= pi / 2)) diag.add({}, "theta_n." + std::to_string(n), "must lie in [0, pi/2]");
  if (c.loop_points < 8) diag.add({}, "loop_points", "must be at least 8");
  if (c.steps < 8) diag.add({}, "steps", "must be at least 8");
  if (c.phi_points < 4) diag.add({}, "phi_points", "must be at least 4");
  if (c.base_grid < 8) diag.add({}, "base_grid", "must be at least 8");
  if (c.gauge_trials < 1) diag.add({}, "gauge_trials", "must be at least 1");
  for (auto [name, v] : {std::pair{"tol", c.tol}, std::pair{"gauge_tol", c.gauge_tol}, std::pair{"weight_tol", c.weight_tol},
                         std::pair{"cyclicity_threshold", c.cyclicity_threshold}})
    if (!(v > 0.0) || !std::isfinite(v)) diag.add({}, name, "must be positive");
  if (c.omega_o && *c.omega_o == 0.0 && (c.experiment == "ring-rotating" || c.experiment == "gauge-sweep"))
    diag.add({}, "omega_o", "must be nonzero for a rotating field");
  if (c.experiment == "direct-sum" && c.n_levels.size() < 2) diag.add({}, "n_levels", "direct-sum needs at least two blocks");
  diag.raise_if_any();

  // Ring preconditions, including the degenerate Delta = g = 0 point.
  try {
    c.ring_params(c.rotation_rate()).validate();
  } catch (const Error& e) {
    Diagnostics ring;
    ring.add({}, "epsilon/chi/n_levels", e.what());
    ring.raise_if_any(e.kind() == ErrorKind::degenerate_theta ? ErrorKind::degenerate_theta : ErrorKind::usage);
  }
}

// ---- reports -------------------------------------------------------------------

struct Row {
  std::string quantity;
  double value = 0.0;
  std::optional<double> reference;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;  // value must reach `tolerance` from above (ratios, gauge changes)
  std::optional<double> convergence_estimate;
  std::string anchor;
  std::string note;

  bool passed() const {
    if (std::isnan(deviation) || (!lower_bound && std::isinf(deviation))) return false;
    return lower_bound ? deviation >= tolerance : deviation <= tolerance;
  }
};

struct Report {
  ExperimentConfig config;
  std::vector<Row> rows;

  bool converged() const {
    for (const Row& r : rows)
      if (!r.passed()) return false;
    return !rows.empty();
  }
};

namespace detail {

inline std::string level(int n) { return "n=" + std::to_string(n); }
inline std::string pm(int sign) { return sign > 0 ? "+" : "-"; }

inline Row phase_row(std::string q, double value, double ref, double tol, std::string anchor,
                     std::optional<double> conv = std::nullopt) {
  return {std::move(q), value, ref, phase_distance(value, ref), tol, false, conv, std::move(anchor), {}};
}

inline Row real_row(std::string q, double value, double ref, double tol, std::string anchor,
                    std::optional<double> conv = std::nullopt) {
  return {std::move(q), value, ref, std::abs(value - ref), tol, false, conv, std::move(anchor), {}};
}

/// A quantity whose size is itself the deviation (a defect, a drift, a spectrum distance).
inline Row defect_row(std::string q, double value, double tol, std::string anchor) {
  return {std::move(q), value, 0.0, value, tol, false, std::nullopt, std::move(anchor), {}};
}

inline Row floor_row(std::string q, double value, double floor, std::string anchor) {
  return {std::move(q), value, std::nullopt, value, floor, true, std::nullopt, std::move(anchor), {}};
}

inline double berry(const FrameSampler& f, double period, std::size_t m) {
  return holonomy::berry_phase(holonomy::sample_frames(f, holonomy::loop_grid(period, m)));
}

inline ComplexMatrix gamma_matrix(const FrameSampler& f, double period, std::size_t m) {
  return holonomy::phase_matrix(holonomy::connection_samples(holonomy::sample_frames(f, holonomy::loop_grid(period, m))));
}

inline double max_entry_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

inline TorusWavefunction action_family(const RingModelParams& p, int n, int sign, std::size_t phi_points,
                                       std::size_t loop_points) {
  RingModelParams q = p;
  q.n_levels = {n};
  const auto model = models::ring_action(q, phi_points);
  const auto& b = model.blocks.front();
  return action::sample_family(sign > 0 ? b.eigenfunction_plus : b.eigenfunction_minus,
                               action::uniform_loop(0.0, two_pi, loop_points));
}

/// Adds the total / dynamic / geometric rows of an AA run. Over one period of these
/// precession models the total phase is pi and the dynamic phase is -sign pi cos 2theta,
/// both shifted by -mean_energy * period.
inline void add_aa_rows(std::vector<Row>& rows, const std::string& tag, const OperatorFamily& h, const Ket& psi0,
                        double theta, int sign, double mean_energy, const ExperimentConfig& c,
                        const std::string& anchor) {
  const PhaseReport r = aa_phase(h, psi0, c.steps, c.cyclicity_threshold);
  const double shift = mean_energy * h.period();
  const double gamma = wrap_phase(pi * (1.0 + sign * std::cos(2 * theta)));
  rows.push_back(phase_row(tag + " AA total phase", r.total, wrap_phase(pi - shift), c.tol, anchor));
  rows.push_back(real_row(tag + " AA dynamic phase", r.dynamic, -sign * pi * std::cos(2 * theta) - shift, c.tol, anchor));
  rows.push_back(phase_row(tag + " AA geometric phase", r.geometric, gamma, c.tol, anchor, r.convergence_estimate));
  rows.push_back(defect_row(tag + " AA cyclicity defect", r.cyclicity_defect, c.cyclicity_threshold, anchor));
}

/// Ratio of successive deviations; halvings where both sit at roundoff count as exact.
inline double worst_ratio(const std::vector<double>& errors) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] <= 1e-11 && errors[i + 1] <= 1e-11) continue;
    worst = std::min(worst, errors[i] / errors[i + 1]);
  }
  return worst;
}

}  // namespace detail

// ---- the seven experiments -----------------------------------------------------------

inline std::vector<Row> run_spin(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[0].anchor;
  const auto m = models::spin_half({c.omega_s, c.theta});
  std::vector<Row> rows;
  for (int sign : {+1, -1}) {
    const std::string tag = "gamma" + detail::pm(sign);
    const auto& frames = m.reference.frames.at("phi" + detail::pm(sign));
    const double ref = m.reference.phases.at(tag);
    const double g = detail::berry(frames, m.period, c.loop_points);
    const double half = detail::berry(frames, m.period, c.loop_points / 2);
    rows.push_back(detail::phase_row(tag + " holonomy", g, ref, c.tol, anchor, phase_distance(g, half)));
    detail::add_aa_rows(rows, "psi" + detail::pm(sign), m.hamiltonian, m.initial_state(sign), c.theta, sign, 0.0, c,
                        anchor);
  }
  return rows;
}

inline std::vector<Row> run_ring_static(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[1].anchor;
  const RingModelParams p = c.ring_params();
  const auto model = models::ring_static(p);
  const double rho2 = p.rho() * p.rho();
  std::vector<Row> rows;
  for (const auto& b : model.blocks) {
    const double mean = p.Omega * ((b.n + 0.5) * (b.n + 0.5) + 0.25 * rho2);
    for (int sign : {+1, -1}) {
      const std::string tag = detail::level(b.n) + " gamma" + detail::pm(sign);
      const auto& frames = b.reference.frames.at("phi" + detail::pm(sign));
      const double ref = b.reference.phases.at("gamma" + detail::pm(sign));
      const double g = detail::berry(frames, b.period, c.loop_points);
      const double half = detail::berry(frames, b.period, c.loop_points / 2);
      rows.push_back(detail::phase_row(tag + " holonomy", g, ref, c.tol, anchor, phase_distance(g, half)));
      detail::add_aa_rows(rows, detail::level(b.n) + " psi" + detail::pm(sign), b.hamiltonian, b.initial_state(sign),
                          b.theta_n, sign, mean, c, anchor);
    }
  }
  return rows;
}

inline std::vector<Row> run_ring_rotating(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[2].anchor;
  const auto model = models::ring_rotating(c.ring_params(c.rotation_rate()));
  std::vector<Row> rows;
  for (const auto& b : model.blocks) {
    const std::string tag = detail::level(b.n);
    const FramePath path = holonomy::sample_frames(b.frames, holonomy::loop_grid(b.period, c.loop_points));
    const ComplexMatrix gamma = holonomy::phase_matrix(holonomy::connection_samples(path));
    const ComplexMatrix half = detail::gamma_matrix(b.frames, b.period, c.loop_points / 2);
    const ComplexMatrix& ref = *b.reference.phase_matrix;
    const double conv = detail::max_entry_diff(gamma, half);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const std::string e = tag + " Gamma[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        rows.push_back(detail::real_row(e + " re", gamma(i, j).real(), ref(i, j).real(), c.tol, anchor, conv));
        rows.push_back(detail::real_row(e + " im", gamma(i, j).imag(), ref(i, j).imag(), c.tol, anchor, conv));
      }
    const auto es = linalg::eigh(gamma);
    rows.push_back(detail::real_row(tag + " Gamma eigenvalue 0", es.values[0], 0.0, c.tol, anchor));
    rows.push_back(detail::real_row(tag + " Gamma eigenvalue 1", es.values[1], two_pi, c.tol, anchor));
    rows.push_back(detail::defect_row(tag + " Wilson loop distance to identity",
                                      detail::max_entry_diff(holonomy::wilson_loop(path), ComplexMatrix::identity(2)),
                                      c.tol, anchor));
  }
  return rows;
}

inline std::vector<Row> run_ring_action(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[3].anchor;
  const RingModelParams p = c.ring_params();
  const double c2 = std::cos(2 * p.big_theta());
  const double dvt = two_pi / static_cast<double>(c.loop_points);
  std::vector<Row> rows;
  for (int n : p.n_levels)
    for (int sign : {+1, -1}) {
      const std::string tag = detail::level(n) + " xi'" + detail::pm(sign);
      const auto fam = detail::action_family(p, n, sign, c.phi_points, c.loop_points);
      const auto coarse = detail::action_family(p, n, sign, c.phi_points, c.loop_points / 2);
      const double g = action::torus_phase(fam);
      const double ref = wrap_phase(pi * (1.0 - sign * c2));
      rows.push_back(detail::phase_row(tag + " phase", g, ref, c.tol, anchor, phase_distance(g, action::torus_phase(coarse))));
      // Per-interval 1-form against -i(1 -/+ cos 2Theta) dvartheta / 2.
      double worst = 0.0;
      for (const Complex& t : action::torus_connection_samples(fam))
        worst = std::max(worst, std::abs(t - Complex(0.0, -(1.0 - sign * c2) * dvt / 2)));
      rows.push_back(detail::defect_row(tag + " connection 1-form max deviation", worst, c.tol * 1e-2, anchor));
    }
  return rows;
}

inline std::vector<Row> run_direct_sum(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[4].anchor;
  const RingModelParams p = c.ring_params();
  const auto model = models::ring_static(p);
  std::map<int, OperatorFamily> hs;
  for (const auto& b : model.blocks) hs.emplace(b.n, b.hamiltonian);
  // Block n precesses at Omega rho (n + 1/2), so after 4 pi / (Omega rho) every block
  // has completed exactly 2n + 1 cycles.
  EvolveOptions opts;
  opts.duration = 2.0 * two_pi / (p.Omega * p.rho());
  const double amp = 1.0 / std::sqrt(static_cast<double>(model.blocks.size()));
  const std::size_t steps = c.steps * (2 * static_cast<std::size_t>(*std::max_element(p.n_levels.begin(), p.n_levels.end())) + 1);
  std::vector<Row> rows;
  for (int sign : {+1, -1}) {
    const std::string tag = "psi" + detail::pm(sign);
    RingState psi;
    for (const auto& b : model.blocks) psi.blocks[b.n] = scaled(b.initial_state(sign), amp);
    const RingTrajectory tr = blockwise_evolve(hs, psi, steps, opts);
    for (const auto& b : model.blocks) {
      double drift = 0.0;
      for (const RingState& s : tr.states) drift = std::max(drift, std::abs(s.weight(b.n) - amp * amp));
      const std::string bt = tag + " " + detail::level(b.n);
      rows.push_back(detail::defect_row(bt + " block weight drift", drift, c.weight_tol, anchor));
      const double cycles = 2.0 * b.n + 1.0;
      const PhaseReport in_sum = aa_phase(tr.blocks.at(b.n), c.cyclicity_threshold);
      const PhaseReport alone = aa_phase(evolve(b.hamiltonian, b.initial_state(sign), c.steps), c.cyclicity_threshold);
      rows.push_back(detail::phase_row(bt + " geometric phase in sum", in_sum.geometric, wrap_phase(cycles * alone.geometric),
                                       c.tol, anchor));
      rows.push_back(detail::phase_row(bt + " total phase in sum", in_sum.total, wrap_phase(cycles * alone.total), c.tol, anchor));
    }
  }
  return rows;
}

inline std::vector<Row> run_gauge_sweep(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[5].anchor;
  std::mt19937_64 rng(c.seed);
  const std::size_t m = c.loop_points;
  const int n0 = c.n_levels.front();
  std::vector<std::pair<std::string, FramePath>> paths;
  {
    const auto s = models::spin_half({c.omega_s, c.theta});
    paths.emplace_back("spin", holonomy::sample_frames(s.reference.frames.at("phi+"), holonomy::loop_grid(s.period, m)));
  }
  {
    RingModelParams p = c.ring_params();
    p.n_levels = {n0};
    const auto rs = models::ring_static(p);
    const auto& b = rs.block(n0);
    paths.emplace_back("static ring " + detail::level(n0),
                       holonomy::sample_frames(b.reference.frames.at("phi-"), holonomy::loop_grid(b.period, m)));
  }
  {
    RingModelParams p = c.ring_params(c.rotation_rate());
    p.n_levels = {n0};
    const auto rr = models::ring_rotating(p);
    const auto& b = rr.blocks.front();
    paths.emplace_back("rotating ring " + detail::level(n0), holonomy::sample_frames(b.frames, holonomy::loop_grid(b.period, m)));
  }
  paths.emplace_back("ring action " + detail::level(n0),
                     action::as_frame_path(detail::action_family(c.ring_params(), n0, +1, c.phi_points, m)));

  std::vector<Row> rows;
  for (const auto& [name, path] : paths) {
    const ComplexMatrix w = holonomy::wilson_loop(path);
    const auto base = holonomy::connection_samples(path);
    double spectrum = 0.0;
    double least_change = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < c.gauge_trials; ++trial) {
      const FramePath moved = holonomy::gauge_transform(path, holonomy::smooth_random_gauge(path.rank(), path.intervals(), rng));
      spectrum = std::max(spectrum, holonomy::wilson_spectrum_distance(holonomy::wilson_loop(moved), w));
      const auto now = holonomy::connection_samples(moved);
      double change = 0.0;
      for (std::size_t k = 0; k < now.size(); ++k) change = std::max(change, detail::max_entry_diff(now[k], base[k]));
      least_change = std::min(least_change, change);
    }
    rows.push_back(detail::defect_row(name + " Wilson spectrum shift", spectrum, c.gauge_tol, anchor));
    rows.push_back(detail::floor_row(name + " connection change, weakest gauge", least_change, c.min_gauge_change, anchor));
  }
  return rows;
}

inline std::vector<Row> run_convergence(const ExperimentConfig& c) {
  const std::string anchor = list_experiments()[6].anchor;
  const std::vector<std::size_t> grids{c.base_grid, 2 * c.base_grid, 4 * c.base_grid};
  std::vector<Row> rows;
  auto add = [&](const std::string& name, const std::function<double(std::size_t)>& err) {
    std::vector<double> e;
    for (std::size_t m : grids) e.push_back(err(m));
    Row r = detail::floor_row(name + " deviation ratio per halving", detail::worst_ratio(e), c.order_ratio, anchor);
    r.convergence_estimate = e.back();
    if (std::isinf(r.value)) r.note = "every deviation at roundoff; the scheme is exact here";
    rows.push_back(r);
  };
  const auto spin = models::spin_half({c.omega_s, c.theta});
  add("spin gamma+ holonomy", [&](std::size_t m) {
    return phase_distance(detail::berry(spin.reference.frames.at("phi+"), spin.period, m), spin.reference.phases.at("gamma+"));
  });
  add("spin psi+ AA geometric", [&](std::size_t m) {
    return phase_distance(aa_phase(evolve(spin.hamiltonian, spin.initial_state(+1), m), c.cyclicity_threshold).geometric,
                          spin.reference.phases.at("gamma+"));
  });
  const int n0 = c.n_levels.front();
  RingModelParams p = c.ring_params();
  p.n_levels = {n0};
  const auto rs = models::ring_static(p);
  const auto& sb = rs.block(n0);
  add("static ring " + detail::level(n0) + " gamma+ holonomy", [&](std::size_t m) {
    return phase_distance(detail::berry(sb.reference.frames.at("phi+"), sb.period, m), sb.reference.phases.at("gamma+"));
  });
  RingModelParams pr = c.ring_params(c.rotation_rate());
  pr.n_levels = {n0};
  const auto rr = models::ring_rotating(pr);
  const auto& rb = rr.blocks.front();
  add("rotating ring " + detail::level(n0) + " Gamma", [&](std::size_t m) {
    return detail::max_entry_diff(detail::gamma_matrix(rb.frames, rb.period, m), *rb.reference.phase_matrix);
  });
  {
    // Time-dependent Hamiltonian: compare with the exact solution in the co-rotating frame,
    // where the block Hamiltonian is constant.
    const Ket psi0 = normalized(Ket{Complex(0.6, 0.0), Complex(0.2, -0.77)});
    const ComplexMatrix k0 = models::ring_kinetic_block(pr, n0, 0.0);
    const double w = pr.omega_o;
    const ComplexMatrix h_eff = hermitian_part(pr.Omega * (k0 * k0) - (0.5 * w) * (ComplexMatrix::identity(2) - pauli_z()));
    const Ket exact = ComplexMatrix::diagonal({1.0, std::polar(1.0, -w * rb.period)}) *
                      (linalg::propagator(h_eff, rb.period) * psi0);
    add("rotating ring " + detail::level(n0) + " propagation", [&](std::size_t m) {
      EvolveOptions opts;
      opts.record_stride = m;
      return distance(evolve(rb.hamiltonian, psi0, m, opts).final(), exact);
    });
  }
  const double c2 = std::cos(2 * p.big_theta());
  for (int sign : {+1, -1})
    add("ring action " + detail::level(n0) + " xi'" + detail::pm(sign), [&](std::size_t m) {
      return phase_distance(action::torus_phase(detail::action_family(p, n0, sign, c.phi_points, m)),
                            wrap_phase(pi * (1.0 - sign * c2)));
    });
  return rows;
}

/// Validate, then run. Library failures during the computation propagate as geophase::Error.
inline Report run(const ExperimentConfig& c) {
  validate(c);
  Report rep{c, {}};
  if (c.experiment == "spin") rep.rows = run_spin(c);
  else if (c.experiment == "ring-static") rep.rows = run_ring_static(c);
  else if (c.experiment == "ring-rotating") rep.rows = run_ring_rotating(c);
  else if (c.experiment == "ring-action") rep.rows = run_ring_action(c);
  else if (c.experiment == "direct-sum") rep.rows = run_direct_sum(c);
  else if (c.experiment == "gauge-sweep") rep.rows = run_gauge_sweep(c);
  else rep.rows = run_convergence(c);
  return rep;
}

/// Independent experiments, optionally concurrent; results keep the input order either way.
inline std::vector<Report> run_all(const std::vector<ExperimentConfig>& configs, bool parallel) {
  if (!parallel) {
    std::vector<Report> out;
    for (const auto& c : configs) out.push_back(run(c));
    return out;
  }
  std::vector<std::future<Report>> jobs;
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [c] { return run(c); }));
  std::vector<Report> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// ---- serialization ---------------------------------------------------------------

inline nlohmann::ordered_json inputs_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["omega_s"] = c.omega_s;
  j["theta"] = c.theta;
  j["epsilon"] = c.epsilon;
  j["chi"] = c.chi;
  j["Omega"] = c.Omega;
  j["omega_o"] = c.rotation_rate();
  j["n_levels"] = c.n_levels;
  nlohmann::ordered_json th = nlohmann::ordered_json::object();
  for (const auto& [n, v] : c.theta_n) th[std::to_string(n)] = v;
  j["theta_n"] = th;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& [n, v] : c.I_n) in[std::to_string(n)] = v;
  j["I_n"] = in;
  j["loop_points"] = c.loop_points;
  j["steps"] = c.steps;
  j["phi_points"] = c.phi_points;
  j["base_grid"] = c.base_grid;
  j["gauge_trials"] = c.gauge_trials;
  j["tol"] = c.tol;
  j["gauge_tol"] = c.gauge_tol;
  j["weight_tol"] = c.weight_tol;
  j["min_gauge_change"] = c.min_gauge_change;
  j["order_ratio"] = c.order_ratio;
  j["cyclicity_threshold"] = c.cyclicity_threshold;
  j["seed"] = c.seed;
  return j;
}

/// The report body. Timestamps live only in `metadata`, which callers add separately.
inline nlohmann::ordered_json to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["experiment"] = rep.config.experiment;
  j["inputs"] = inputs_json(rep.config);
  j["results"] = nlohmann::ordered_json::array();
  j["references"] = nlohmann::ordered_json::array();
  j["deviations"] = nlohmann::ordered_json::array();
  for (const Row& r : rep.rows) {
    nlohmann::ordered_json res{{"quantity", r.quantity}, {"value", r.value}, {"anchor", r.anchor}};
    if (r.convergence_estimate) res["convergence_estimate"] = *r.convergence_estimate;
    if (!r.note.empty()) res["note"] = r.note;
    j["results"].push_back(res);
    if (r.reference) j["references"].push_back({{"quantity", r.quantity}, {"value", *r.reference}, {"anchor", r.anchor}});
    j["deviations"].push_back({{"quantity", r.quantity},
                               {"deviation", r.deviation},
                               {r.lower_bound ? "minimum" : "tolerance", r.tolerance},
                               {"within_tolerance", r.passed()}});
  }
  j["converged"] = rep.converged();
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string csv_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_header() {
  return "experiment,quantity,value,reference,deviation,bound,bound_kind,passed,convergence_estimate,anchor,note\n";
}

/// One row per reported quantity.
inline std::string to_csv_rows(const Report& rep) {
  std::ostringstream os;
  for (const Row& r : rep.rows) {
    os << rep.config.experiment << ',' << csv_field(r.quantity) << ',' << csv_number(r.value) << ','
       << (r.reference ? csv_number(*r.reference) : "") << ',' << csv_number(r.deviation) << ',' << csv_number(r.tolerance)
       << ',' << (r.lower_bound ? "min" : "max") << ',' << (r.passed() ? "true" : "false") << ','
       << (r.convergence_estimate ? csv_number(*r.convergence_estimate) : "") << ',' << csv_field(r.anchor) << ','
       << csv_field(r.note) << '\n';
  }
  return os.str();
}

/// Failed rows as a fixed-width table, for the error stream.
inline std::string deviation_table(const Report& rep) {
  std::ostringstream os;
  for (const Row& r : rep.rows) {
    if (r.passed()) continue;
    os << "  " << std::left << std::setw(48) << (rep.config.experiment + ": " + r.quantity) << std::right
       << std::setprecision(4) << std::setw(12) << r.deviation << (r.lower_bound ? "  < min " : "  > tol ")
       << r.tolerance << '\n';
  }
  return os.str();
}

}  // namespace geophase::experiments
