#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pam/spectral_models.hpp"

namespace pam {

enum class ChaosMode { quadrature, monte_carlo };

struct ChaosOptions {
  ChaosMode mode = ChaosMode::quadrature;
  int gauss_points = 32;     // per nested time variable
  long samples = 200000;     // monte_carlo
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ChaosTerm {
  double value = 0.0;
  double std_err = 0.0;  // 0 in quadrature mode
};

/// d-th term of the second moment of u(t, x) for u0 = 1:
///   I_d = lambda^d int_{0 < s_1 < ... < s_d < t} E prod_j gamma_eps(X(s_j)) ds,
/// X = B^1 - B^2 a Brownian motion with variance 2s, so that I_d = E[(lambda int gamma_eps(X))^d] / d!.
/// Quadrature mode integrates the Gaussian xi-integral in closed form for white
/// noise (d <= 4); other measures support d <= 1 there. Monte-Carlo mode samples
/// ordered times and the motion X in real space, for any d and measure.
ChaosTerm chaos_term(int d, double t, const SpectralMeasure& m, double eps, double lambda,
                     const ChaosOptions& opts = {});

struct ChaosSeriesResult {
  double t = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  std::vector<double> terms;        // I_0 .. I_Dmax
  std::vector<double> term_errors;  // MC standard errors, zeros in quadrature mode
  double partial_sum = 1.0;
  double partial_sum_err = 0.0;
  double tail_bound = 0.0;  // geometric extrapolation, heuristic
  double ratio = 0.0;       // I_D / I_{D-1}
  bool converged = false;
};

/// E u(t, x)^2 = sum_d I_d truncated at D_max, with tail I_D r / (1 - r), r the
/// last term ratio. Throws series_not_converging when r >= 0.9.
ChaosSeriesResult second_moment_chaos(double t, const SpectralMeasure& m, double eps, double lambda,
                                      int d_max, const ChaosOptions& opts = {});

}  // namespace pam
