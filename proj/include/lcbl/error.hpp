#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcbl {

enum class ErrorKind {
  invalid_dimension,
  invalid_input,
  convexity_violation,
  quadrature_failure,
  truncation_failure,
  budget_exceeded,
  unsupported_form,
  solver_failure,
  domain_error,
  mode_error,
  degenerate_slice,
  config_error,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this type; `kind()` lets callers
/// (the CLI in particular) map them onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace lcbl
