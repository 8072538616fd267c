#include "pam/error.hpp"

namespace pam {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parameter_out_of_range: return "parameter-out-of-range";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::quadrature_nonconvergent: return "quadrature-nonconvergent";
    case ErrorCode::invalid_regularization: return "invalid-regularization";
    case ErrorCode::grid_too_coarse: return "grid-too-coarse";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::unnormalized_input: return "unnormalized-input";
    case ErrorCode::symmetry_violation: return "symmetry-violation";
    case ErrorCode::nonmonotone_sequence: return "nonmonotone-sequence";
    case ErrorCode::instance_too_large: return "instance-too-large";
    case ErrorCode::unsupported_initial_data: return "unsupported-initial-data";
    case ErrorCode::insufficient_points: return "insufficient-points";
    case ErrorCode::order_too_high: return "order-too-high";
    case ErrorCode::series_not_converging: return "series-not-converging";
    case ErrorCode::negative_en: return "negative-En";
    case ErrorCode::undetermined_tails: return "undetermined-tails";
    case ErrorCode::parameter_mismatch: return "parameter-mismatch";
    case ErrorCode::degenerate_estimate: return "degenerate-estimate";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace pam
