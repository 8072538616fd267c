#include "pam/chaos_oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pam/error.hpp"
#include "pam/quadrature.hpp"
#include "pam/rng.hpp"
#include "parallel.hpp"

namespace pam {

namespace {

double factorial(int d) {
  double f = 1.0;
  for (int k = 2; k <= d; ++k) f *= k;
  return f;
}

// White noise: int exp(-xi^T Q xi) dxi over R^{l d} with Q = M^T G M + eps I,
// M_{jk} = 1 for k >= j, G = diag(gaps). Row j of M collects the frequencies
// still "alive" during gap j.
double white_xi_integral(const std::vector<double>& gaps, double eps, int ell) {
  const int d = static_cast<int>(gaps.size());
  Eigen::MatrixXd q = eps * Eigen::MatrixXd::Identity(d, d);
  for (int j = 0; j < d; ++j)
    for (int a = j; a < d; ++a)
      for (int b = j; b < d; ++b) q(a, b) += gaps[j];
  const double det = q.llt().matrixL().toDenseMatrix().diagonal().prod();  // sqrt(det Q)
  const double per_axis = std::pow(std::numbers::pi, 0.5 * d) / det;
  return std::pow(per_axis * std::pow(2.0 * std::numbers::pi, -d), ell);
}

// Nested Gauss-Legendre over the gaps g_1 + ... + g_d <= t, with g = rem v^2 to
// soften the (g + eps)^{-1/2} behaviour at small gaps.
double simplex_quadrature(int d, double t, double eps, int ell, int points) {
  const GaussRule& r = gauss_legendre(points);
  std::vector<double> gaps(d);
  double total = 0.0;
  std::vector<int> idx(d, 0);
  while (true) {
    double rem = t;
    double weight = 1.0;
    for (int j = 0; j < d; ++j) {
      const double v = 0.5 * (r.nodes[idx[j]] + 1.0);
      gaps[j] = rem * v * v;
      weight *= 0.5 * r.weights[idx[j]] * 2.0 * v * rem;
      rem -= gaps[j];
    }
    total += weight * white_xi_integral(gaps, eps, ell);
    int j = d - 1;
    while (j >= 0 && ++idx[j] == points) idx[j--] = 0;
    if (j < 0) break;
  }
  return total;
}

ChaosTerm simplex_monte_carlo(int d, double t, const SpectralMeasure& m, double eps, const ChaosOptions& opts) {
  const int ell = m.dim();
  const CovarianceKernel kernel(m, eps, 14.0 * std::sqrt(2.0 * t) + 1.0);
  std::vector<double> vals;
  detail::parallel_fill(opts.samples, opts.threads, vals, [&](long i) {
    Xoshiro256 rng(opts.seed, static_cast<std::uint64_t>(i));
    std::vector<double> s(d);
    for (double& v : s) v = t * rng.uniform();
    std::sort(s.begin(), s.end());
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(ell, 0.0);
    double prev = 0.0;
    double prod = 1.0;
    for (int j = 0; j < d; ++j) {
      const double sd = std::sqrt(2.0 * (s[j] - prev));
      double r2 = 0.0;
      for (int a = 0; a < ell; ++a) {
        x[a] += sd * normal(rng);
        r2 += x[a] * x[a];
      }
      prod *= kernel(std::sqrt(r2));
      prev = s[j];
    }
    return prod;
  });
  double mean = 0.0, sq = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  for (double v : vals) sq += (v - mean) * (v - mean);
  const double N = static_cast<double>(vals.size());
  const double se = std::sqrt(sq / (N - 1.0) / N);
  const double vol = std::pow(t, d) / factorial(d);
  return {vol * mean, vol * se};
}

}  // namespace

ChaosTerm chaos_term(int d, double t, const SpectralMeasure& m, double eps, double lambda, const ChaosOptions& opts) {
  if (d < 0) throw Error(ErrorCode::parameter_out_of_range, "order must be nonnegative");
  if (!(t > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "t must be positive");
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_regularization, "eps must be positive");
  if (d == 0) return {1.0, 0.0};
  if (lambda == 0.0) return {0.0, 0.0};
  const double scale = std::pow(lambda, d);
  if (opts.mode == ChaosMode::monte_carlo) {
    if (opts.samples < 100) throw Error(ErrorCode::parameter_out_of_range, "need at least 100 samples");
    const ChaosTerm c = simplex_monte_carlo(d, t, m, eps, opts);
    return {scale * c.value, std::abs(scale) * c.std_err};
  }
  if (m.kind() == MeasureKind::white_noise) {
    if (d > 4) throw Error(ErrorCode::order_too_high, "quadrature mode supports d <= 4");
    return {scale * simplex_quadrature(d, t, eps, m.dim(), opts.gauss_points), 0.0};
  }
  if (d > 1) throw Error(ErrorCode::order_too_high, "quadrature mode supports d <= 1 for this measure");
  // E gamma_eps(X(s)) = gamma_{eps + s}(0)
  auto q = integrate_adaptive(
      [&](double s) { return regularized_covariance_value(m, eps + s, 0.0); }, 0.0, t,
      AdaptiveOptions{.abs_tol = 1e-12, .rel_tol = 1e-9});
  if (!q.converged) throw Error(ErrorCode::quadrature_nonconvergent, "first chaos term");
  return {scale * q.value, 0.0};
}

ChaosSeriesResult second_moment_chaos(double t, const SpectralMeasure& m, double eps, double lambda, int d_max,
                                      const ChaosOptions& opts) {
  if (d_max < 1) throw Error(ErrorCode::parameter_out_of_range, "D_max must be at least 1");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::parameter_out_of_range, "the series needs lambda >= 0");
  ChaosSeriesResult r;
  r.t = t;
  r.eps = eps;
  r.lambda = lambda;
  double var = 0.0;
  r.partial_sum = 0.0;
  for (int d = 0; d <= d_max; ++d) {
    const ChaosTerm c = chaos_term(d, t, m, eps, lambda, opts);
    r.terms.push_back(c.value);
    r.term_errors.push_back(c.std_err);
    r.partial_sum += c.value;
    var += c.std_err * c.std_err;
  }
  r.partial_sum_err = std::sqrt(var);
  const double last = r.terms[d_max];
  const double prev = r.terms[d_max - 1];
  r.ratio = prev > 0.0 ? last / prev : 0.0;
  if (r.ratio >= 0.9)
    throw Error(ErrorCode::series_not_converging,
                "term ratio " + std::to_string(r.ratio) + " >= 0.9; reduce t or lambda");
  r.tail_bound = last > 0.0 ? last * r.ratio / (1.0 - r.ratio) : 0.0;
  r.converged = r.tail_bound < 1e-3 * r.partial_sum;
  return r;
}

}  // namespace pam
