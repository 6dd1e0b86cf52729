#include "lcbl/error.hpp"

namespace lcbl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::convexity_violation: return "convexity-violation";
    case ErrorKind::quadrature_failure: return "quadrature-failure";
    case ErrorKind::truncation_failure: return "truncation-failure";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::unsupported_form: return "unsupported-form";
    case ErrorKind::solver_failure: return "solver-failure";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::mode_error: return "mode-error";
    case ErrorKind::degenerate_slice: return "degenerate-slice";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace lcbl
