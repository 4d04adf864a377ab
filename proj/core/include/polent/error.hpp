#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polent {

/// Failure categories. Each maps onto one process exit code of the CLI.
enum class ErrorKind {
  Domain,               ///< argument outside the mathematical domain
  Resolution,           ///< grid too coarse for the model
  EmptySupport,         ///< filtering removed every sample
  DegeneratePostSelection,
  NonphysicalCoherence,
  InterpolationDomain,
  UnidentifiableFit,
  Convergence,
  InvalidState,
  Config,
  Format,
  Usage,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// 2 = configuration, 3 = numeric/convergence, 4 = format.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace polent
