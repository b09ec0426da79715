#include "helab/grid.hpp"

#include <string>

#include "helab/error.hpp"

namespace helab {

Grid3::Grid3(int n) : n_(n) {
  if (n < 8 || (n & (n - 1)) != 0) {
    throw Error(ErrorCode::precondition, "grid size must be a power of two >= 8, got " + std::to_string(n));
  }
}

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unsupported_rank: return "unsupported_rank";
    case ErrorCode::rank_mismatch: return "rank_mismatch";
    case ErrorCode::grid_mismatch: return "grid_mismatch";
    case ErrorCode::mean_mode: return "mean_mode";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::resolution: return "resolution";
    case ErrorCode::under_resolved_kernel: return "under_resolved_kernel";
    case ErrorCode::too_few_neighbors: return "too_few_neighbors";
    case ErrorCode::too_few_lags: return "too_few_lags";
    case ErrorCode::zero_quantity: return "zero_quantity";
    case ErrorCode::cfl_violation: return "cfl_violation";
    case ErrorCode::blow_up: return "blow_up";
    case ErrorCode::io: return "io";
    case ErrorCode::config: return "config";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::digest_mismatch: return "digest_mismatch";
  }
  return "unknown";
}

}  // namespace helab
