#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kinex {

enum class ErrorCode {
  invalid_argument = 1,
  degenerate_state,
  internal_consistency,
  non_convergence,
  stability,
  conservation,
  calibration_failure,
  divergent_mean,
  accuracy,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when the horizon is exhausted; carries the state reached so callers
// can resume or inspect it.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last_state, double residual)
      : Error(ErrorCode::non_convergence, what),
        last_state_(std::move(last_state)),
        residual_(residual) {}

  const std::vector<double>& last_state() const noexcept { return last_state_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_state_;
  double residual_;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, double g_low, double g_high)
      : Error(ErrorCode::calibration_failure, what), g_low_(g_low), g_high_(g_high) {}

  double g_at_lower() const noexcept { return g_low_; }
  double g_at_upper() const noexcept { return g_high_; }

 private:
  double g_low_;
  double g_high_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kinex
