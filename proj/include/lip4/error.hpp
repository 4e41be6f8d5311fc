#pragma once

#include <stdexcept>
#include <string>

namespace lip4 {

// Exit codes surfaced by the command-line tool.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  input_format = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::usage; }
};

/// Bad arguments: shape mismatch, k > n, unknown method names.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed LIPK / JSON input.
class FormatError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::input_format; }
};

/// Overflow, non-convergence, degenerate iterates.
class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
};

}  // namespace lip4
