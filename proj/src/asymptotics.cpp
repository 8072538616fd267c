#include "pam/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pam/error.hpp"
#include "pam/quadrature.hpp"

namespace pam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

void check_n_en(int n, double En) {
  require(n >= 1, ErrorCode::parameter_out_of_range, "n must be positive");
  require(En >= 0.0, ErrorCode::negative_en, "En must be nonnegative");
}

double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  const double series = -0.5 / x2 + 0.75 / (x2 * x2) - 1.875 / (x2 * x2 * x2);
  return -x2 - std::log(x * std::sqrt(std::numbers::pi)) + std::log1p(series);
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log int_{u >= u0} exp{-sum_j (u + v_j - c t)^2 / (2t)} du, v_1 = 0.
double log_inner(std::span<const double> v, double c, double t) {
  const int n = static_cast<int>(v.size());
  double mean = 0.0, lo = 0.0;
  for (double x : v) {
    mean += x - c * t;
    lo = std::min(lo, x);
  }
  mean /= n;
  double spread = 0.0;
  for (double x : v) spread += (x - c * t - mean) * (x - c * t - mean);
  const double u0 = -lo;
  return 0.5 * std::log(std::numbers::pi * t / (2.0 * n)) + log_erfc((u0 + mean) * std::sqrt(n / (2.0 * t))) -
         spread / (2.0 * t);
}

// log sum over Gauss-Legendre nodes on [a, b] of w_i exp(f(x_i)).
template <class F>
double log_gauss(F f, double a, double b, int points) {
  const GaussRule& r = gauss_legendre(points);
  const double h = 0.5 * (b - a);
  double acc = -kInf;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc = log_add(acc, std::log(h * r.weights[i]) + f(a + h * (r.nodes[i] + 1.0)));
  return acc;
}

// Same over [a, b] split at the interior breakpoints.
template <class F>
double log_gauss_split(F f, double a, double b, std::initializer_list<double> cuts, int points) {
  std::vector<double> pts{a};
  for (double c : cuts)
    if (c > a && c < b) pts.push_back(c);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double acc = -kInf;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) acc = log_add(acc, log_gauss(f, pts[i], pts[i + 1], points));
  return acc;
}

double ldev_log_integral(double alpha, double beta, int n, double M, double t, int points) {
  const double c = alpha - beta;
  const double shift = n * (0.5 * beta * beta - alpha * beta) * t;
  double logI;
  if (n == 1) {
    const double v[] = {0.0};
    logI = log_inner(v, c, t);
  } else if (n == 2) {
    auto f = [&](double v2) {
      const double v[] = {0.0, v2};
      return log_inner(v, c, t);
    };
    logI = log_gauss_split(f, -M, M, {0.0}, points);
  } else {
    auto outer = [&](double v2) {
      auto inner = [&](double v3) {
        const double v[] = {0.0, v2, v3};
        return log_inner(v, c, t);
      };
      return log_gauss_split(inner, std::max(-M, v2 - M), std::min(M, v2 + M), {0.0, v2}, points);
    };
    logI = log_gauss_split(outer, -M, M, {0.0}, points);
  }
  return (shift + logI) / t;
}

double front1_integral(const SpectralMeasure& m) {
  RadialWeight w;
  w.w = [](double r) { return 1.0 / (r * r); };
  w.exponent_at_zero = -2.0;
  w.exponent_at_infinity = -2.0;
  w.pure_power = -2.0;
  return radial_integral(m, w);
}

double front2_integral(const SpectralMeasure& m) {
  RadialWeight w1, w2;
  w1.w = [](double r) { return 1.0 / (r * r); };
  w1.exponent_at_zero = w1.exponent_at_infinity = -2.0;
  w1.pure_power = -2.0;
  w2 = w1;
  w2.density_power = 2;
  if (!radial_integral_finite(m, w1) || !radial_integral_finite(m, w2)) return kInf;
  return radial_integral(m, w1) + radial_integral(m, w2);
}

// s int e^{-s |xi|^2} mu(dxi).
double heat_mass(const SpectralMeasure& m, double s) {
  RadialWeight w;
  w.w = [s](double r) { return std::exp(-s * r * r); };
  w.gaussian_eps = s;
  return s * radial_integral(m, w);
}

}  // namespace

double growth_lower(int n, double En) {
  check_n_en(n, En);
  return std::sqrt(2.0 * En / n);
}

double growth_upper(int n, double En, double beta_sup) {
  check_n_en(n, En);
  require(beta_sup > 0.0, ErrorCode::parameter_out_of_range, "beta_sup must be positive");
  const double star = std::sqrt(2.0 * En / n);
  if (star < beta_sup) return star;
  return 0.5 * beta_sup + En / (n * beta_sup);
}

std::pair<double, double> growth_exponential_case(int n, double En, double beta) {
  check_n_en(n, En);
  require(beta > 0.0, ErrorCode::parameter_out_of_range, "beta must be positive");
  const double star = std::sqrt(2.0 * En / n);
  const double v = beta < star ? 0.5 * beta + En / (n * beta) : star;
  return {v, v};
}

GrowthIndexReport growth_index(int n, double En, double En_err, GrowthRegime regime,
                               std::span<const double> betas) {
  GrowthIndexReport r;
  r.n = n;
  r.En = En;
  r.En_err = En_err;
  r.regime = regime;
  r.betas.assign(betas.begin(), betas.end());
  switch (regime) {
    case GrowthRegime::compact:
      r.lower_star = growth_lower(n, En);
      r.upper_star = growth_upper(n, En, kInf);
      break;
    case GrowthRegime::exponential: {
      require(betas.size() == 1, ErrorCode::parameter_out_of_range, "exponential regime takes one beta");
      std::tie(r.lower_star, r.upper_star) = growth_exponential_case(n, En, betas[0]);
      break;
    }
    case GrowthRegime::generic: {
      require(!betas.empty(), ErrorCode::parameter_out_of_range, "generic regime needs beta values");
      const double sup = *std::max_element(betas.begin(), betas.end());
      r.lower_star = growth_lower(n, En);
      r.upper_star = growth_upper(n, En, sup);
      break;
    }
  }
  r.equal = r.lower_star == r.upper_star;
  return r;
}

double ldev_rate(double alpha, double beta, int n) {
  require(alpha > 0.0 && beta > 0.0, ErrorCode::parameter_out_of_range, "alpha and beta must be positive");
  require(n >= 1, ErrorCode::parameter_out_of_range, "n must be positive");
  if (alpha > beta) return n * (0.5 * beta * beta - beta * alpha);
  return -0.5 * n * alpha * alpha;
}

double ldev_numeric(double alpha, double beta, int n, double M, double t, const LdevOptions& opts) {
  require(alpha > 0.0 && beta > 0.0, ErrorCode::parameter_out_of_range, "alpha and beta must be positive");
  require(n >= 1 && n <= 3, ErrorCode::instance_too_large, "strip integral supports n <= 3");
  require(M > 0.0, ErrorCode::parameter_out_of_range, "M must be positive");
  require(t >= 50.0, ErrorCode::parameter_out_of_range, "t must be at least 50");
  const double coarse = ldev_log_integral(alpha, beta, n, M, t, opts.gauss_points);
  const double fine = ldev_log_integral(alpha, beta, n, M, t, 2 * opts.gauss_points);
  require(std::isfinite(fine) && std::abs(fine - coarse) <= opts.rel_tol * std::max(1.0, std::abs(fine)),
          ErrorCode::quadrature_nonconvergent, "strip quadrature did not stabilize");
  return fine;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    case Verdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

PhaseReport phase_predicate(const SpectralMeasure& m) {
  const TailSpec& tails = m.tails();
  require(std::isfinite(tails.exponent_at_zero) && std::isfinite(tails.exponent_at_infinity),
          ErrorCode::undetermined_tails, "tail exponents must be declared");
  const int ell = m.dim();
  const double two_pi_l = std::pow(2.0 * std::numbers::pi, ell);
  PhaseReport rep;

  const bool h2 = check_h2(m).h2_ok;
  bool h1 = false;
  if (!h2 && ell == 1 && m.kind() != MeasureKind::riesz) {
    std::vector<double> probes;
    for (int i = -30; i <= 30; ++i) probes.push_back(std::pow(10.0, i / 10.0));
    const auto r = check_h1(m, probes, 1e6);
    h1 = r.h1a_ok && r.h1b_ok;
  }
  if (h2) {
    rep.hypothesis = "H.2";
  } else if (m.kind() == MeasureKind::riesz) {
    // E_n(lambda gamma) = lambda^{2/(2 - eta)} E_n(gamma): no critical strength
    rep.hypothesis = "homogeneous";
  } else if (h1) {
    rep.hypothesis = "H.1";
  } else {
    rep.hypothesis = "assumed";
  }

  rep.criterion_value = front1_integral(m);
  const bool finite = std::isfinite(rep.criterion_value);
  if (finite) rep.lambdanc_upper = two_pi_l * std::numbers::e / (2.0 * rep.criterion_value);
  if (ell == 1) rep.h1_criterion_value = front2_integral(m);

  if (rep.hypothesis == "H.1") {
    rep.occurs = std::isfinite(*rep.h1_criterion_value) ? Verdict::yes : Verdict::undetermined;
  } else {
    rep.occurs = finite ? Verdict::yes : Verdict::no;
  }

  // s int e^{-s|xi|^2} mu ~ s^{1 - (e0 + l)/2} as s -> inf when the density reaches 0
  if (tails.r_min == 0.0 && tails.exponent_at_zero + ell < 2.0) {
    rep.lambda2c_upper = 0.0;
    rep.argmax_s = kInf;
  } else {
    auto g = [&](double u) { return heat_mass(m, std::exp(u)); };
    const double lo = -40.0, hi = 40.0;
    const int grid = 161;
    std::vector<double> us(grid), vals(grid);
    for (int i = 0; i < grid; ++i) {
      us[i] = lo + (hi - lo) * i / (grid - 1);
      vals[i] = g(us[i]);
    }
    // refine the three best local maxima of the scan
    std::vector<int> peaks;
    for (int i = 0; i < grid; ++i) {
      const bool left = i == 0 || vals[i] >= vals[i - 1];
      const bool right = i == grid - 1 || vals[i] >= vals[i + 1];
      if (left && right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    if (peaks.size() > 3) peaks.resize(3);
    double best = 0.0, best_u = us[0];
    for (int i : peaks) {
      const double a = us[std::max(0, i - 1)], b = us[std::min(grid - 1, i + 1)];
      const double u = golden_section_max(g, a, b, 1e-6);
      const double v = g(u);
      if (v > best) {
        best = v;
        best_u = u;
      }
      if (vals[i] > best) {
        best = vals[i];
        best_u = us[i];
      }
    }
    rep.argmax_s = std::exp(best_u);
    rep.lambda2c_upper = best > 0.0 ? ell * two_pi_l / (4.0 * best) : kInf;
  }
  return rep;
}

double log_strip_mass_pair(double t, double M) {
  require(t > 0.0 && M > 0.0, ErrorCode::parameter_out_of_range, "t and M must be positive");
  return std::log(std::erf(M / (2.0 * std::sqrt(t))));
}

DiagnosticsReport finite_t_diagnostics(int n, double En, double En_err, std::span<const DiagnosticInput> inputs) {
  require(!inputs.empty(), ErrorCode::insufficient_points, "no moment estimates");
  DiagnosticsReport rep;
  rep.n = n;
  rep.En = En;
  rep.En_err = En_err;
  const double eps = inputs[0].estimate.eps;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& e = inputs[i].estimate;
    require(e.n == n, ErrorCode::parameter_mismatch, "estimate has a different n");
    require(e.eps == eps, ErrorCode::parameter_mismatch, "estimates use different eps");
    require(e.t > 0.0, ErrorCode::parameter_mismatch, "estimate has no horizon");
    if (i > 0)
      require(e.t > inputs[i - 1].estimate.t, ErrorCode::parameter_mismatch, "horizons must increase");
  }
  // intercepts of least-squares lines through the log ratios against t
  auto intercept = [&](auto value) {
    if (inputs.size() < 2) return 0.0;
    double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& in : inputs) {
      const double x = in.estimate.t, y = value(in);
      s += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (s * sxy - sx * sy) / (s * sxx - sx * sx);
    return (sy - slope * sx) / s;
  };
  rep.slack_upper = std::max(0.0, intercept([](const DiagnosticInput& in) {
    return in.estimate.log_mean - in.log_heat;
  }));
  rep.slack_lower = std::max(0.0, -intercept([](const DiagnosticInput& in) {
    return in.estimate.log_mean - in.log_strip;
  }));
  for (const auto& in : inputs) {
    DiagnosticRow row;
    const double t = in.estimate.t;
    row.t = t;
    row.upper_lhs = (in.estimate.log_mean - in.log_heat) / t;
    row.lower_lhs = (in.estimate.log_mean - in.log_strip) / t;
    row.lhs_err = in.estimate.std_err / t;
    row.upper_bound = En + rep.slack_upper / t;
    row.lower_bound = En - rep.slack_lower / t;
    const double tol = 3.0 * std::hypot(row.lhs_err, En_err);
    row.upper_violation = row.upper_lhs > row.upper_bound + tol;
    row.lower_violation = row.lower_lhs < row.lower_bound - tol;
    rep.any_violation = rep.any_violation || row.upper_violation || row.lower_violation;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace pam
