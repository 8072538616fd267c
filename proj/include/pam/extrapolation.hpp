#pragma once

#include <span>
#include <vector>

namespace pam {

struct Extrapolated {
  double value = 0.0;
  double error = 0.0;  // size of the last correction
  bool ok = true;      // false when the sequence does not look convergent
};

/// Richardson table in the step size h for errors c_1 h^{p_1} + c_2 h^{p_2} + ...
/// with exponents `orders` (used in turn, as many as the data allows).
Extrapolated richardson(std::span<const double> steps, std::span<const double> values,
                        std::span<const double> orders = {});

/// Aitken delta-squared on the last three entries; exact for a + b q^k, which
/// covers a + b e^{-cL} on an arithmetic L schedule and a + b eps^p on a
/// geometric eps schedule. Differences at the noise level `floor` are treated as
/// converged.
Extrapolated aitken(std::span<const double> values, double floor = 0.0);

}  // namespace pam
