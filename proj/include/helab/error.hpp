#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helab {

enum class ErrorCode {
  unsupported_rank,
  rank_mismatch,
  grid_mismatch,
  mean_mode,
  precondition,
  out_of_range,
  resolution,
  under_resolved_kernel,
  too_few_neighbors,
  too_few_lags,
  zero_quantity,
  cfl_violation,
  blow_up,
  io,
  config,
  conflict,
  digest_mismatch,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Base of every error raised by the toolkit. Violated preconditions and
/// malformed inputs map to exit code 1 in the harness.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Numerical failure (NaN, blow-up). Maps to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace helab
