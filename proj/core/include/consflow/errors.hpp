#pragma once

#include <stdexcept>
#include <string>

namespace consflow {

enum class ErrorCode {
  not_symmetric,
  no_convergence,
  singular,
  rank_deficient,
  disconnected,
  bad_param,
  zero_row,
  mismatched_topology,
  bad_gain,
  non_finite,
  insufficient_data,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// All recoverable failures are reported through this exception; the CLI
/// maps every code to exit 1 with a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_symmetric: return "not symmetric";
    case ErrorCode::no_convergence: return "no convergence";
    case ErrorCode::singular: return "singular";
    case ErrorCode::rank_deficient: return "rank deficient";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::bad_param: return "bad parameter";
    case ErrorCode::zero_row: return "zero row";
    case ErrorCode::mismatched_topology: return "mismatched topology";
    case ErrorCode::bad_gain: return "bad gain";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::insufficient_data: return "insufficient data";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::io_error: return "io error";
  }
  return "unknown error";
}

}  // namespace consflow
