#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geophase {

enum class ErrorKind {
  symmetry_violation,  // Hermitian / skew-Hermitian / unitary precondition broken
  dimension_mismatch,
  branch_ambiguity,    // eigenvalue on the principal-log branch cut
  rank_deficiency,     // singular input to polar decomposition
  invalid_frame,
  invalid_parameter,
  degenerate_theta,    // Delta = g = 0 in the ring models
  misuse,
  not_normalized,
  non_cyclic,
  tracking_ambiguity,  // eigenvalue crossing along a tracked path
  degeneracy_split,    // eigen-group rank changed along a loop
  grid_too_coarse,
  invalid_gauge,
  normalization_drift,
  usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::symmetry_violation: return "symmetry-violation";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::branch_ambiguity: return "branch-ambiguity";
    case ErrorKind::rank_deficiency: return "rank-deficiency";
    case ErrorKind::invalid_frame: return "invalid-frame";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::degenerate_theta: return "degenerate-theta";
    case ErrorKind::misuse: return "misuse";
    case ErrorKind::not_normalized: return "not-normalized";
    case ErrorKind::non_cyclic: return "non-cyclic";
    case ErrorKind::tracking_ambiguity: return "tracking-ambiguity";
    case ErrorKind::degeneracy_split: return "degeneracy-split";
    case ErrorKind::grid_too_coarse: return "grid-too-coarse";
    case ErrorKind::invalid_gauge: return "invalid-gauge";
    case ErrorKind::normalization_drift: return "normalization-drift";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geophase
