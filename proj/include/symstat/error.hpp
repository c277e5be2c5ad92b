#pragma once

#include <stdexcept>
#include <string>

namespace symstat {

enum class ErrorKind {
  unsupported_mode,
  budget,
  invalid_size,
  invalid_argument,
  invalid_range,
  degenerate_linear_part,
  insufficient_signal,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unsupported_mode: return "unsupported-mode";
    case ErrorKind::budget: return "budget";
    case ErrorKind::invalid_size: return "invalid-size";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_range: return "invalid-range";
    case ErrorKind::degenerate_linear_part: return "degenerate-linear-part";
    case ErrorKind::insufficient_signal: return "insufficient-signal";
  }
  return "error";
}

}  // namespace symstat
