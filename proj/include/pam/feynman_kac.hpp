#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pam/rng.hpp"
#include "pam/spectral_models.hpp"

namespace pam {

/// Path sampled at s_k = k t / K, k = 0..K; positions are row-major (K + 1) x dim.
struct BridgePath {
  double t = 0.0;
  int dim = 1;
  std::vector<double> times;
  std::vector<double> positions;
  double at(int k, int a = 0) const { return positions[static_cast<std::size_t>(k) * dim + a]; }
};

/// Brownian bridge from 0 to 0 on [0, t]: B(s) = W(s) - (s/t) W(t) per coordinate.
BridgePath sample_bridge(double t, int K, Xoshiro256& rng, int dim = 1);
/// Brownian motion from 0 with exact Gaussian increments.
BridgePath sample_brownian(double t, int K, Xoshiro256& rng, int dim = 1);

enum class InitialKind { constant_one, compact_indicator, exponential, custom };

/// u0 >= 0. compact_indicator: 1{|x| <= radius}; exponential: C e^{-beta |x|}.
struct InitialDataSpec {
  InitialKind kind = InitialKind::constant_one;
  double radius = 1.0;
  double beta = 1.0;
  double scale = 1.0;
  std::function<double(std::span<const double>)> custom;
  double operator()(std::span<const double> x) const;
};

struct MCEstimate {
  double log_mean = 0.0;
  double std_err = 0.0;  // delta-method standard error of log_mean
  long samples = 0;
  long saturated = 0;    // samples whose log weight was not finite
  double t = 0.0;
  int n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// lambda * trapezoid over the K slices of sum_{j<k} gamma_eps(path^j(s) - path^k(s)
/// + x^j - x^k + (s/t)(y^j - y^k)). Offsets are row-major n x l and may be empty.
double interaction_integral(std::span<const BridgePath> paths, std::span<const double> x,
                            std::span<const double> y, const CovarianceKernel& kernel, double lambda);

struct MCOptions {
  long samples = 100000;
  int K = 256;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

/// E prod_j u(t, x^j) by the bridge representation: y^j ~ N(0, t I) carries the heat
/// kernels, the bridges carry the interaction, and the weight is
/// exp(interaction) * prod_j u0(x^j + y^j).
MCEstimate moment_fk_bridge(int n, double t, std::span<const double> x, const InitialDataSpec& u0,
                            const SpectralMeasure& m, double eps, double lambda, const MCOptions& opts);

/// E exp(lambda int_0^t sum_{j<k} gamma_eps(B^j - B^k + y^j - y^k) ds) for independent
/// Brownian motions, the moment for u0 = 1.
MCEstimate moment_fk_bm(int n, double t, std::span<const double> y, const SpectralMeasure& m, double eps,
                        double lambda, const MCOptions& opts);

struct MomentPoint {
  double t = 0.0;
  double log_moment = 0.0;
  double std_err = 0.0;
};

/// Weighted least-squares slope of log_moment against t over the points with
/// t >= t_max / 2; (slope, standard error of the slope).
std::pair<double, double> lyapunov_slope(std::span<const MomentPoint> points);

/// Streaming log-sum-exp accumulator for positive weights given by their logs.
class LogMeanAccumulator {
 public:
  void add(double log_weight);
  void merge(const LogMeanAccumulator& other);
  long count() const { return count_; }
  long skipped() const { return skipped_; }
  double log_mean() const;
  double std_err() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double s1_ = 0.0;  // sum e^{x - max}
  double s2_ = 0.0;  // sum e^{2(x - max)}
  long count_ = 0;
  long skipped_ = 0;
};

}  // namespace pam
