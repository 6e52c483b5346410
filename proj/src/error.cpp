#include "kinex/error.hpp"

namespace kinex {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::degenerate_state: return "degenerate-state";
    case ErrorCode::internal_consistency: return "internal-consistency";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::stability: return "stability";
    case ErrorCode::conservation: return "conservation";
    case ErrorCode::calibration_failure: return "calibration-failure";
    case ErrorCode::divergent_mean: return "divergent-mean";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace kinex
