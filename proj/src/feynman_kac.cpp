#include "pam/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pam/error.hpp"
#include "pam/quadrature.hpp"
#include "parallel.hpp"

namespace pam {

namespace {

BridgePath brownian_path(double t, int K, Xoshiro256& rng, int dim) {
  if (K < 2 || !(t > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "need K >= 2 and t > 0");
  if (dim < 1) throw Error(ErrorCode::dimension_mismatch, "path dimension must be positive");
  BridgePath p;
  p.t = t;
  p.dim = dim;
  p.times.resize(K + 1);
  for (int k = 0; k <= K; ++k) p.times[k] = t * k / K;
  p.times[K] = t;
  p.positions.assign(static_cast<std::size_t>(K + 1) * dim, 0.0);
  std::normal_distribution<double> normal(0.0, std::sqrt(t / K));
  for (int a = 0; a < dim; ++a)
    for (int k = 1; k <= K; ++k) p.positions[k * dim + a] = p.positions[(k - 1) * dim + a] + normal(rng);
  return p;
}

void pin_end(BridgePath& p) {
  const int K = static_cast<int>(p.times.size()) - 1;
  const int d = p.dim;
  for (int a = 0; a < d; ++a) {
    const double end = p.positions[K * d + a];
    for (int k = 1; k < K; ++k) p.positions[k * d + a] -= p.times[k] / p.t * end;
    p.positions[K * d + a] = 0.0;
  }
}

void check_eps(const SpectralMeasure& m, double eps) {
  if (!(eps > 0.0)) {
    if (m.kind() == MeasureKind::white_noise)
      throw Error(ErrorCode::invalid_regularization,
                  "white noise at eps = 0 is a local-time functional; pass eps > 0");
    throw Error(ErrorCode::invalid_regularization, "eps must be positive");
  }
}

double kernel_reach(double t, int n, std::span<const double> offsets) {
  double spread = 0.0;
  for (double v : offsets) spread = std::max(spread, std::abs(v));
  return 2.0 * spread + 12.0 * std::sqrt(t * std::max(2, n)) + 1.0;
}

MCEstimate finish(const std::vector<double>& logs, int n, double t, double eps, const MCOptions& opts) {
  LogMeanAccumulator acc;
  for (double v : logs) acc.add(v);
  MCEstimate e;
  e.samples = acc.count();
  e.saturated = acc.skipped();
  e.log_mean = acc.log_mean();
  e.std_err = acc.std_err();
  e.t = t;
  e.n = n;
  e.eps = eps;
  e.seed = opts.seed;
  if (e.saturated > 0) e.warnings.push_back("saturated samples: " + std::to_string(e.saturated));
  if (opts.K < 4.0 * t / std::sqrt(eps))
    e.warnings.push_back("K below 4 t / sqrt(eps); time quadrature may be coarse");
  return e;
}

void check_mc(int n, double t, const MCOptions& opts) {
  if (n < 1) throw Error(ErrorCode::parameter_out_of_range, "n must be positive");
  if (!(t > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "t must be positive");
  if (opts.samples < 100) throw Error(ErrorCode::parameter_out_of_range, "need at least 100 samples");
  if (opts.K < 2) throw Error(ErrorCode::parameter_out_of_range, "need K >= 2");
}

}  // namespace

BridgePath sample_bridge(double t, int K, Xoshiro256& rng, int dim) {
  BridgePath p = brownian_path(t, K, rng, dim);
  pin_end(p);
  return p;
}

BridgePath sample_brownian(double t, int K, Xoshiro256& rng, int dim) { return brownian_path(t, K, rng, dim); }

double InitialDataSpec::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  switch (kind) {
    case InitialKind::constant_one:
      return 1.0;
    case InitialKind::compact_indicator:
      return std::sqrt(r2) <= radius ? 1.0 : 0.0;
    case InitialKind::exponential:
      return scale * std::exp(-beta * std::sqrt(r2));
    case InitialKind::custom: {
      if (!custom) throw Error(ErrorCode::unsupported_initial_data, "custom initial data without a function");
      const double v = custom(x);
      if (!(v >= 0.0)) throw Error(ErrorCode::unsupported_initial_data, "initial data must be nonnegative");
      return v;
    }
  }
  return 0.0;
}

double interaction_integral(std::span<const BridgePath> paths, std::span<const double> x,
                            std::span<const double> y, const CovarianceKernel& kernel, double lambda) {
  const std::size_t n = paths.size();
  if (n == 0) return 0.0;
  const int d = paths[0].dim;
  const std::size_t nodes = paths[0].times.size();
  for (const auto& p : paths)
    if (p.dim != d || p.times.size() != nodes)
      throw Error(ErrorCode::dimension_mismatch, "paths must share dimension and time grid");
  if ((!x.empty() && x.size() != n * d) || (!y.empty() && y.size() != n * d))
    throw Error(ErrorCode::dimension_mismatch, "offsets must be n x l");
  if (!(kernel.eps() > 0.0)) throw Error(ErrorCode::invalid_regularization, "eps must be positive");
  if (lambda == 0.0 || n < 2) return 0.0;
  const double t = paths[0].t;
  const auto w = trapezoid_weights(nodes - 1, t);
  double total = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double frac = paths[0].times[k] / t;
    double slice = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
          double v = paths[i].positions[k * d + a] - paths[j].positions[k * d + a];
          if (!x.empty()) v += x[i * d + a] - x[j * d + a];
          if (!y.empty()) v += frac * (y[i * d + a] - y[j * d + a]);
          r2 += v * v;
        }
        slice += kernel(std::sqrt(r2));
      }
    total += w[k] * slice;
  }
  return lambda * total;
}

MCEstimate moment_fk_bridge(int n, double t, std::span<const double> x, const InitialDataSpec& u0,
                            const SpectralMeasure& m, double eps, double lambda, const MCOptions& opts) {
  check_mc(n, t, opts);
  check_eps(m, eps);
  const int d = m.dim();
  if (!x.empty() && x.size() != static_cast<std::size_t>(n) * d)
    throw Error(ErrorCode::dimension_mismatch, "x must hold n points of dimension l");
  if (u0.kind == InitialKind::exponential && !(u0.beta > 0.0))
    throw Error(ErrorCode::unsupported_initial_data, "exponential initial data needs beta > 0");
  if (u0.kind == InitialKind::custom && !u0.custom)
    throw Error(ErrorCode::unsupported_initial_data, "custom initial data without a function");
  const CovarianceKernel kernel(m, eps, kernel_reach(t, n, x) + 12.0 * std::sqrt(t));
  const double sd = std::sqrt(t);

  std::vector<double> logs;
  detail::parallel_fill(opts.samples, opts.threads, logs, [&](long i) {
    Xoshiro256 rng(opts.seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, sd);
    std::vector<double> y(static_cast<std::size_t>(n) * d);
    for (double& v : y) v = normal(rng);
    double log_u0 = 0.0;
    std::vector<double> end(d);
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < d; ++a) end[a] = (x.empty() ? 0.0 : x[j * d + a]) + y[j * d + a];
      const double u = u0(end);
      if (u <= 0.0) return -std::numeric_limits<double>::infinity();
      log_u0 += std::log(u);
    }
    std::vector<BridgePath> paths;
    paths.reserve(n);
    for (int j = 0; j < n; ++j) paths.push_back(sample_bridge(t, opts.K, rng, d));
    return interaction_integral(paths, x, y, kernel, lambda) + log_u0;
  });
  return finish(logs, n, t, eps, opts);
}

MCEstimate moment_fk_bm(int n, double t, std::span<const double> y, const SpectralMeasure& m, double eps,
                        double lambda, const MCOptions& opts) {
  check_mc(n, t, opts);
  check_eps(m, eps);
  const int d = m.dim();
  if (!y.empty() && y.size() != static_cast<std::size_t>(n) * d)
    throw Error(ErrorCode::dimension_mismatch, "y must hold n points of dimension l");
  const CovarianceKernel kernel(m, eps, kernel_reach(t, n, y));
  std::vector<double> logs;
  detail::parallel_fill(opts.samples, opts.threads, logs, [&](long i) {
    Xoshiro256 rng(opts.seed, static_cast<std::uint64_t>(i));
    std::vector<BridgePath> paths;
    paths.reserve(n);
    for (int j = 0; j < n; ++j) paths.push_back(sample_brownian(t, opts.K, rng, d));
    return interaction_integral(paths, y, {}, kernel, lambda);
  });
  return finish(logs, n, t, eps, opts);
}

std::pair<double, double> lyapunov_slope(std::span<const MomentPoint> points) {
  if (points.size() < 3) throw Error(ErrorCode::insufficient_points, "need at least 3 points");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].t > points[i - 1].t))
      throw Error(ErrorCode::parameter_out_of_range, "times must increase");
  const double cut = 0.5 * points.back().t;
  std::vector<MomentPoint> use;
  for (const auto& p : points)
    if (p.t >= cut) use.push_back(p);
  if (use.size() < 2) throw Error(ErrorCode::insufficient_points, "fewer than two points in the upper half");
  bool weighted = true;
  for (const auto& p : use)
    if (!(p.std_err > 0.0)) weighted = false;
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : use) {
    const double w = weighted ? 1.0 / (p.std_err * p.std_err) : 1.0;
    s += w;
    sx += w * p.t;
    sy += w * p.log_moment;
    sxx += w * p.t * p.t;
    sxy += w * p.t * p.log_moment;
  }
  const double det = s * sxx - sx * sx;
  const double slope = (s * sxy - sx * sy) / det;
  double err;
  if (weighted) {
    err = std::sqrt(s / det);
  } else {
    // unweighted: residual variance, zero for an exact two-point fit
    const double icpt = (sy - slope * sx) / s;
    double rss = 0.0;
    for (const auto& p : use) rss += std::pow(p.log_moment - icpt - slope * p.t, 2);
    const double dof = static_cast<double>(use.size()) - 2.0;
    err = dof > 0 ? std::sqrt(rss / dof * s / det) : 0.0;
  }
  return {slope, err};
}

void LogMeanAccumulator::add(double x) {
  if (x == -std::numeric_limits<double>::infinity()) {  // zero weight
    ++count_;
    return;
  }
  if (!std::isfinite(x)) {
    ++skipped_;
    return;
  }
  ++count_;
  if (x > max_) {
    const double r = std::exp(max_ - x);
    s1_ *= r;
    s2_ *= r * r;
    max_ = x;
  }
  const double e = std::exp(x - max_);
  s1_ += e;
  s2_ += e * e;
}

void LogMeanAccumulator::merge(const LogMeanAccumulator& o) {
  count_ += o.count_;
  skipped_ += o.skipped_;
  if (o.s1_ == 0.0) return;
  if (o.max_ > max_) {
    const double r = std::exp(max_ - o.max_);
    s1_ = s1_ * r + o.s1_;
    s2_ = s2_ * r * r + o.s2_;
    max_ = o.max_;
  } else {
    const double r = std::exp(o.max_ - max_);
    s1_ += o.s1_ * r;
    s2_ += o.s2_ * r * r;
  }
}

double LogMeanAccumulator::log_mean() const {
  if (count_ == 0) throw Error(ErrorCode::degenerate_estimate, "no samples");
  if (s1_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(s1_ / count_);
}

double LogMeanAccumulator::std_err() const {
  if (count_ < 2 || s1_ == 0.0) return 0.0;
  const double N = static_cast<double>(count_);
  const double m1 = s1_ / N;
  const double var = std::max(0.0, s2_ / N - m1 * m1) * N / (N - 1.0);
  return std::sqrt(var / N) / m1;
}

}  // namespace pam
