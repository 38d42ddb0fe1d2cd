#pragma once

#include <stdexcept>
#include <string>

namespace devlab {

/// Machine-readable failure categories. The string form is what ends up in
/// report JSON under "code".
enum class ErrorCode {
  InvalidArgument,
  GridMismatch,
  NotClamped,
  NotSPD,
  Infeasible,
  Inadmissible,
  SolveFailure,
  ParseError,
  EvalError,
  ConfigError,
  OracleFailure,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace devlab
