#include "pam/extrapolation.hpp"

#include <cmath>

#include "pam/error.hpp"

namespace pam {

Extrapolated richardson(std::span<const double> steps, std::span<const double> values,
                        std::span<const double> orders) {
  if (steps.size() != values.size() || steps.empty())
    throw Error(ErrorCode::insufficient_points, "richardson needs matching, nonempty inputs");
  const std::size_t n = values.size();
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) table[i].push_back(values[i]);
  Extrapolated out;
  out.value = values[n - 1];
  out.error = n > 1 ? std::abs(values[n - 1] - values[n - 2]) : 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double p = k - 1 < orders.size() ? orders[k - 1] : 2.0 * k;
    for (std::size_t i = k; i < n; ++i) {
      const double ratio = std::pow(steps[i - 1] / steps[i], p);
      const double prev = table[i][k - 1];
      table[i].push_back(prev + (prev - table[i - 1][k - 1]) / (ratio - 1.0));
    }
    out.error = std::abs(table[n - 1][k] - table[n - 1][k - 1]);
    out.value = table[n - 1][k];
  }
  out.ok = std::isfinite(out.value);
  return out;
}

Extrapolated aitken(std::span<const double> values, double floor) {
  const std::size_t n = values.size();
  if (n < 3) throw Error(ErrorCode::insufficient_points, "aitken needs three values");
  const double x0 = values[n - 3];
  const double x1 = values[n - 2];
  const double x2 = values[n - 1];
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  Extrapolated out{x2, std::abs(d2), true};
  if (std::abs(d2) <= floor) return out;
  if (std::abs(d1) <= floor) {
    // Earlier entries already agree; the last jump is not a convergent tail.
    out.ok = false;
    return out;
  }
  const double q = d2 / d1;
  if (!(q > 0.0 && q < 1.0)) {
    out.ok = false;
    return out;
  }
  const double correction = d2 * q / (1.0 - q);
  out.value = x2 + correction;
  out.error = std::abs(correction);
  return out;
}

}  // namespace pam
