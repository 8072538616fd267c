#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pam {

enum class ErrorCode {
  parameter_out_of_range,
  dimension_mismatch,
  quadrature_nonconvergent,
  invalid_regularization,
  grid_too_coarse,
  no_convergence,
  unnormalized_input,
  symmetry_violation,
  nonmonotone_sequence,
  instance_too_large,
  unsupported_initial_data,
  insufficient_points,
  order_too_high,
  series_not_converging,
  negative_en,
  undetermined_tails,
  parameter_mismatch,
  degenerate_estimate,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; `what()` is "<code>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pam
