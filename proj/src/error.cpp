#include "devlab/error.hpp"

namespace devlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::NotClamped: return "not_clamped";
    case ErrorCode::NotSPD: return "not_spd";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Inadmissible: return "inadmissible";
    case ErrorCode::SolveFailure: return "solve_failure";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::EvalError: return "eval_error";
    case ErrorCode::ConfigError: return "config_error";
    case ErrorCode::OracleFailure: return "oracle_failure";
  }
  return "unknown";
}

}  // namespace devlab
