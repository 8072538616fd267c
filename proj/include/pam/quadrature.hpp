#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pam {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` points, computed by Newton iteration on P_n.
/// Rules are cached per `n`; the returned reference stays valid for the process.
const GaussRule& gauss_legendre(std::size_t n);

double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       std::size_t n = 20);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_depth = 40;
  std::size_t max_panels = 200000;
  std::size_t order = 15;
};

/// Adaptive composite Gauss-Legendre: a panel is accepted once the rule on the
/// panel and the sum of the rule on its two halves agree within tolerance.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const AdaptiveOptions& opts = {});

/// Maximizes a unimodal function on [a, b] by golden-section search.
/// Returns the abscissa of the maximum.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-6, int max_iter = 500);

/// Trapezoid weights for K uniform slices on [0, t] (K + 1 nodes).
std::vector<double> trapezoid_weights(std::size_t slices, double t);

}  // namespace pam
