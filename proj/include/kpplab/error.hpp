#pragma once

#include <stdexcept>
#include <string>

namespace kpplab {

enum class ErrorKind {
  invalid_argument,
  no_positive_equilibrium,
  domain_too_small,
  habitat_mismatch,
  unstable_step,
  diverged,
  mismatched_sampling,
  not_positive,
  resolution_too_coarse,
  no_convergence,
  perron_violation,
  bracket_edge,
  period_too_large,
  validation_failed,
  window_too_short,
  boundary_hit,
  empty_region,
  config,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::no_positive_equilibrium: return "no positive equilibrium";
    case ErrorKind::domain_too_small: return "domain too small";
    case ErrorKind::habitat_mismatch: return "habitat/operator mismatch";
    case ErrorKind::unstable_step: return "unstable time step";
    case ErrorKind::diverged: return "integration diverged";
    case ErrorKind::mismatched_sampling: return "mismatched sampling";
    case ErrorKind::not_positive: return "nonpositive input";
    case ErrorKind::resolution_too_coarse: return "resolution too coarse";
    case ErrorKind::no_convergence: return "no convergence";
    case ErrorKind::perron_violation: return "internal error: eigenfunction not positive";
    case ErrorKind::bracket_edge: return "minimizer at bracket edge";
    case ErrorKind::period_too_large: return "period too large";
    case ErrorKind::validation_failed: return "validation failed";
    case ErrorKind::window_too_short: return "window too short";
    case ErrorKind::boundary_hit: return "front hit boundary";
    case ErrorKind::empty_region: return "empty region";
    case ErrorKind::config: return "config error";
  }
  return "unknown";
}

}  // namespace kpplab
