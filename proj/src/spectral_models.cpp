#include "pam/spectral_models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "pam/error.hpp"
#include "pam/quadrature.hpp"

namespace pam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

double power_band_value(const PowerBand& b, double r) {
  if (r < b.r_min || r > b.r_max) return 0.0;
  if (b.exponent == 0.0) return b.coef;
  if (r == 0.0) return b.exponent > 0.0 ? 0.0 : kInf;
  return b.coef * std::pow(r, b.exponent);
}

TailSpec band_tails(const PowerBand& b) {
  return TailSpec{b.r_min, b.r_max, b.exponent, b.exponent};
}

/// Normalized radial kernel K_l(z) = Gamma(l/2) (2/z)^{l/2-1} J_{l/2-1}(z), K_l(0) = 1,
/// so that int_{S^{l-1}} e^{i r theta.x} dtheta = |S^{l-1}| K_l(r |x|).
double radial_kernel(int dim, double z) {
  if (dim == 1) return std::cos(z);
  if (dim == 3) return std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
  if (std::abs(z) < 1e-4) return 1.0 - z * z / (2.0 * dim);
  const double nu = 0.5 * dim - 1.0;
  if (dim == 2) return std::cyl_bessel_j(0.0, z);
  return std::tgamma(0.5 * dim) * std::pow(2.0 / z, nu) * std::cyl_bessel_j(nu, z);
}

/// Quadrature nodes r_k >= 0 and weights w_k such that
/// gamma_eps(x) ~= sum_k w_k K_l(r_k |x|) for |x| <= x_max.
struct RadialNodes {
  std::vector<double> r;
  std::vector<double> w;
};

double gaussian_cutoff(double eps, double growth_exponent) {
  double r = std::sqrt(40.0 / eps);
  const double g = std::max(0.0, growth_exponent);
  while (std::exp(-eps * r * r) * std::pow(1.0 + r, g) > 1e-18) r *= 1.2;
  return r;
}

RadialNodes build_nodes(const SpectralMeasure& m, double eps, double x_max, int level) {
  const int dim = m.dim();
  const TailSpec& tails = m.tails();
  const double scale = std::pow(2.0 * kPi, -dim) * unit_sphere_area(dim);
  auto integrand = [&](double r) {
    return scale * std::exp(-eps * r * r) * m.radial_density(r) * std::pow(r, dim - 1);
  };
  const GaussRule& rule = gauss_legendre(20);
  RadialNodes nodes;
  auto add_panel = [&](double a, double b, auto&& map) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const auto [r, jac] = map(mid + half * rule.nodes[i]);
      const double w = rule.weights[i] * half * jac * integrand(r);
      if (w != 0.0 && std::isfinite(w)) {
        nodes.r.push_back(r);
        nodes.w.push_back(w);
      }
    }
  };

  const double r_cut =
      std::min(tails.r_max, gaussian_cutoff(eps, tails.exponent_at_infinity + dim - 1));
  const double r_split_raw = x_max > 0.0 ? std::min(1.0, 1.0 / x_max) : 1.0;
  double r_split = std::clamp(r_split_raw, tails.r_min, r_cut);

  // Log-variable panels near the origin, where f may carry a power singularity.
  if (r_split > tails.r_min) {
    double u_lo;
    const double u_hi = std::log(r_split);
    const double kappa0 = tails.exponent_at_zero + dim;
    if (tails.r_min > 0.0) {
      u_lo = std::log(tails.r_min);
    } else {
      require(kappa0 > 0.0, ErrorCode::quadrature_nonconvergent,
              "spectral mass diverges at the origin");
      u_lo = std::max(-700.0, u_hi - 60.0 / kappa0);
    }
    const double width = 2.0 / level;
    const int panels = std::max(1, static_cast<int>(std::ceil((u_hi - u_lo) / width)));
    const double du = (u_hi - u_lo) / panels;
    auto log_map = [](double u) {
      const double r = std::exp(u);
      return std::pair<double, double>{r, r};
    };
    for (int p = 0; p < panels; ++p) add_panel(u_lo + p * du, u_lo + (p + 1) * du, log_map);
    if (tails.r_min == 0.0) {
      // int_{-inf}^{u_lo} C e^{kappa0 u} du for the leading power law.
      const double r_lo = std::exp(u_lo);
      const double tail = integrand(r_lo) * r_lo / kappa0;
      if (tail != 0.0 && std::isfinite(tail)) {
        nodes.r.push_back(0.0);
        nodes.w.push_back(tail);
      }
    }
  }

  // Linear panels resolving both the oscillation at x_max and the Gaussian decay.
  const double lin_lo = std::max(r_split, tails.r_min);
  if (r_cut > lin_lo) {
    double width = 0.5 / std::sqrt(eps);
    if (x_max > 0.0) width = std::min(width, 0.5 * kPi / x_max);
    width = std::min(width, (r_cut - lin_lo) / 4.0);
    width /= level;
    const int panels = std::max(1, static_cast<int>(std::ceil((r_cut - lin_lo) / width)));
    const double dr = (r_cut - lin_lo) / panels;
    auto lin_map = [](double r) { return std::pair<double, double>{r, 1.0}; };
    for (int p = 0; p < panels; ++p) add_panel(lin_lo + p * dr, lin_lo + (p + 1) * dr, lin_map);
  }
  return nodes;
}

double synthesize(const RadialNodes& nodes, int dim, double radius) {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.r.size(); ++k)
    sum += nodes.w[k] * radial_kernel(dim, nodes.r[k] * radius);
  return sum;
}

void require_eps(double eps) {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::invalid_regularization,
          "regularization eps must be positive");
}

/// Refines the node set until the synthesized values at `probes` stabilize.
RadialNodes converged_nodes(const SpectralMeasure& m, double eps, double x_max,
                            std::span<const double> probes) {
  const int dim = m.dim();
  RadialNodes coarse = build_nodes(m, eps, x_max, 1);
  for (int level = 2; level <= 64; level *= 2) {
    RadialNodes fine = build_nodes(m, eps, x_max, level);
    const double origin = synthesize(fine, dim, 0.0);
    bool ok = true;
    for (double x : probes) {
      const double a = synthesize(coarse, dim, x);
      const double b = synthesize(fine, dim, x);
      if (std::abs(a - b) > 1e-13 * std::abs(origin) + 1e-300) {
        ok = false;
        break;
      }
    }
    if (ok) return fine;
    coarse = std::move(fine);
  }
  throw Error(ErrorCode::quadrature_nonconvergent, "regularized covariance quadrature did not settle");
}

}  // namespace

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::white_noise: return "white_noise";
    case MeasureKind::riesz: return "riesz";
    case MeasureKind::fractional: return "fractional";
    case MeasureKind::custom_density: return "custom_density";
  }
  return "unknown";
}

double riesz_normalization(int dim, double eta) {
  require(eta > 0.0 && eta < dim, ErrorCode::parameter_out_of_range,
          "riesz normalization needs 0 < eta < dim");
  return std::pow(2.0, dim - eta) * std::pow(kPi, 0.5 * dim) * std::tgamma(0.5 * (dim - eta)) /
         std::tgamma(0.5 * eta);
}

double fractional_normalization(double hurst) {
  return std::tgamma(2.0 * hurst + 1.0) * std::sin(kPi * hurst);
}

double unit_sphere_area(int dim) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * kPi;
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

SpectralMeasure SpectralMeasure::white_noise() {
  SpectralMeasure m;
  m.kind_ = MeasureKind::white_noise;
  m.dim_ = 1;
  m.band_ = PowerBand{1.0, 0.0, 0.0, kInf};
  m.tails_ = band_tails(*m.band_);
  return m;
}

SpectralMeasure SpectralMeasure::riesz(double eta, int dim) {
  require(dim >= 1, ErrorCode::parameter_out_of_range, "dimension must be positive");
  require(eta > 0.0 && eta < 2.0, ErrorCode::parameter_out_of_range,
          "riesz requires 0 < eta < 2");
  SpectralMeasure m;
  m.kind_ = MeasureKind::riesz;
  m.dim_ = dim;
  m.eta_ = eta;
  // Outside 0 < eta < dim the kernel |x|^{-eta} is not locally integrable and
  // C(l, eta) has no meaning; the bare power law |xi|^{eta-l} is kept.
  const double coef = eta < dim ? riesz_normalization(dim, eta) : 1.0;
  m.band_ = PowerBand{coef, eta - dim, 0.0, kInf};
  m.tails_ = band_tails(*m.band_);
  return m;
}

SpectralMeasure SpectralMeasure::fractional(double hurst) {
  require(hurst > 0.25 && hurst <= 0.5, ErrorCode::parameter_out_of_range,
          "fractional noise requires 1/4 < H <= 1/2");
  SpectralMeasure m;
  m.kind_ = MeasureKind::fractional;
  m.dim_ = 1;
  m.hurst_ = hurst;
  m.band_ = PowerBand{fractional_normalization(hurst), 1.0 - 2.0 * hurst, 0.0, kInf};
  m.tails_ = band_tails(*m.band_);
  return m;
}

SpectralMeasure SpectralMeasure::power_band(const PowerBand& band, int dim, bool h2_attested) {
  require(dim >= 1, ErrorCode::parameter_out_of_range, "dimension must be positive");
  require(band.coef > 0.0 && std::isfinite(band.coef), ErrorCode::parameter_out_of_range,
          "band coefficient must be positive");
  require(band.r_min >= 0.0 && band.r_max > band.r_min, ErrorCode::parameter_out_of_range,
          "band needs 0 <= r_min < r_max");
  SpectralMeasure m;
  m.kind_ = MeasureKind::custom_density;
  m.dim_ = dim;
  m.band_ = band;
  m.tails_ = band_tails(band);
  m.h2_attested_ = h2_attested;
  return m;
}

SpectralMeasure SpectralMeasure::custom(std::function<double(double)> radial_density,
                                        const TailSpec& tails, int dim, bool h2_attested) {
  require(dim >= 1, ErrorCode::parameter_out_of_range, "dimension must be positive");
  require(static_cast<bool>(radial_density), ErrorCode::parameter_out_of_range,
          "custom density must be callable");
  require(tails.r_min >= 0.0 && tails.r_max > tails.r_min, ErrorCode::parameter_out_of_range,
          "support needs 0 <= r_min < r_max");
  SpectralMeasure m;
  m.kind_ = MeasureKind::custom_density;
  m.dim_ = dim;
  m.tails_ = tails;
  m.profile_ = std::move(radial_density);
  m.h2_attested_ = h2_attested;
  return m;
}

double SpectralMeasure::radial_density(double r) const {
  r = std::abs(r);
  if (band_) return power_band_value(*band_, r);
  if (r < tails_.r_min || r > tails_.r_max) return 0.0;
  const double v = profile_(r);
  require(v >= 0.0, ErrorCode::parameter_out_of_range, "spectral density must be nonnegative");
  return v;
}

double SpectralMeasure::density(std::span<const double> xi) const {
  require(static_cast<int>(xi.size()) == dim_, ErrorCode::dimension_mismatch,
          "frequency has wrong dimension");
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  return radial_density(std::sqrt(r2));
}

SpectralMeasure make_spectral_measure(MeasureKind kind, const MeasureParams& params, int dim) {
  switch (kind) {
    case MeasureKind::white_noise:
      require(dim == 1, ErrorCode::parameter_out_of_range, "white noise is only defined for l = 1");
      return SpectralMeasure::white_noise();
    case MeasureKind::riesz:
      return SpectralMeasure::riesz(params.eta, dim);
    case MeasureKind::fractional:
      require(dim == 1, ErrorCode::parameter_out_of_range, "fractional noise requires l = 1");
      return SpectralMeasure::fractional(params.hurst);
    case MeasureKind::custom_density:
      return SpectralMeasure::power_band(params.band, dim, params.h2_attested);
  }
  throw Error(ErrorCode::parameter_out_of_range, "unknown measure kind");
}

bool radial_integral_finite(const SpectralMeasure& m, const RadialWeight& weight) {
  const TailSpec& t = m.tails();
  const int p = weight.density_power;
  if (t.r_min == 0.0 && !(p * t.exponent_at_zero + weight.exponent_at_zero + m.dim() > 0.0))
    return false;
  if (std::isinf(t.r_max) && weight.gaussian_eps <= 0.0 &&
      !(p * t.exponent_at_infinity + weight.exponent_at_infinity + m.dim() < 0.0))
    return false;
  return true;
}

double radial_integral(const SpectralMeasure& m, const RadialWeight& weight) {
  if (!radial_integral_finite(m, weight)) return kInf;
  const TailSpec& t = m.tails();
  const int dim = m.dim();
  const int p = weight.density_power;
  const double sphere = unit_sphere_area(dim);

  if (weight.pure_power && m.band()) {
    const PowerBand& b = *m.band();
    const double k = p * b.exponent + *weight.pure_power + dim;
    const double upper = std::isinf(b.r_max) ? 0.0 : std::pow(b.r_max, k);
    const double lower = b.r_min == 0.0 ? 0.0 : std::pow(b.r_min, k);
    return std::pow(b.coef, p) * sphere * (upper - lower) / k;
  }

  auto g = [&](double u) {
    const double r = std::exp(u);
    const double f = m.radial_density(r);
    return sphere * std::pow(f, p) * weight.w(r) * std::exp(u * dim);
  };
  const double kappa0 = p * t.exponent_at_zero + weight.exponent_at_zero + dim;
  const double kappa_inf = p * t.exponent_at_infinity + weight.exponent_at_infinity + dim;
  const double u_lo = t.r_min > 0.0 ? std::log(t.r_min) : std::max(-700.0, -60.0 / kappa0);
  double u_hi;
  if (std::isfinite(t.r_max)) {
    u_hi = std::log(t.r_max);
  } else if (weight.gaussian_eps > 0.0) {
    u_hi = std::log(gaussian_cutoff(weight.gaussian_eps, p * t.exponent_at_infinity +
                                                            weight.exponent_at_infinity + dim));
  } else {
    u_hi = std::min(700.0, 60.0 / (-kappa_inf));
  }
  double total = 0.0;
  if (u_hi > u_lo) {
    const int panels = std::max(1, static_cast<int>(std::ceil(u_hi - u_lo)));
    const double du = (u_hi - u_lo) / panels;
    AdaptiveOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-300;
    for (int i = 0; i < panels; ++i) {
      const QuadratureResult q = integrate_adaptive(g, u_lo + i * du, u_lo + (i + 1) * du, opts);
      require(q.converged || std::abs(q.error) < 1e-10 * std::abs(total + q.value),
              ErrorCode::quadrature_nonconvergent, "radial quadrature failed to stabilize");
      total += q.value;
    }
  }
  if (t.r_min == 0.0) total += g(u_lo) / kappa0;
  if (std::isinf(t.r_max) && weight.gaussian_eps <= 0.0) total += g(u_hi) / (-kappa_inf);
  return total;
}

std::pair<bool, double> check_dalang(const SpectralMeasure& m, const QuadratureSpec&) {
  RadialWeight w;
  w.w = [](double r) { return 1.0 / (1.0 + r * r); };
  w.exponent_at_zero = 0.0;
  w.exponent_at_infinity = -2.0;
  if (!radial_integral_finite(m, w)) return {false, kInf};
  return {true, radial_integral(m, w)};
}

HypothesisReport check_h1(const SpectralMeasure& m, std::span<const double> probe_grid,
                          double kappa_max) {
  require(m.dim() == 1, ErrorCode::dimension_mismatch, "hypothesis H.1 is one-dimensional");
  HypothesisReport rep;
  const auto [dalang_ok, dalang_value] = check_dalang(m);
  rep.dalang_ok = dalang_ok;
  rep.dalang_value = dalang_value;
  rep.details.emplace_back("dalang", dalang_value);

  double kappa = 0.0;
  for (double a : probe_grid) {
    for (double b : probe_grid) {
      // xi and eta of either sign: |xi + eta| is a + b or |a - b|
      const double denom = m.radial_density(a) + m.radial_density(b);
      for (double sum : {a + b, std::abs(a - b)}) {
        const double num = m.radial_density(sum);
        if (denom > 0.0) {
          kappa = std::max(kappa, num / denom);
        } else if (num > 0.0) {
          kappa = kInf;
        }
      }
    }
  }
  rep.kappa_estimate = kappa;
  rep.h1a_ok = kappa <= kappa_max;
  rep.details.emplace_back("kappa", kappa);

  RadialWeight w;
  w.w = [](double r) { return 1.0 / (1.0 + r * r); };
  w.exponent_at_infinity = -2.0;
  w.density_power = 2;
  const double h1b_value = radial_integral(m, w);
  rep.h1b_ok = std::isfinite(h1b_value);
  rep.details.emplace_back("h1b_integral", h1b_value);
  return rep;
}

HypothesisReport check_h2(const SpectralMeasure& m) {
  HypothesisReport rep;
  const auto [dalang_ok, dalang_value] = check_dalang(m);
  rep.dalang_ok = dalang_ok;
  rep.dalang_value = dalang_value;
  rep.details.emplace_back("dalang", dalang_value);
  bool catalog_ok = false;
  switch (m.kind()) {
    case MeasureKind::white_noise:
      catalog_ok = m.dim() == 1;
      rep.details.emplace_back("dirac_delta", 1.0);
      break;
    case MeasureKind::riesz:
      catalog_ok = m.eta() > 0.0 && m.eta() < std::min(2.0, static_cast<double>(m.dim()));
      rep.details.emplace_back(catalog_ok ? "riesz_admissible" : "riesz_not_locally_integrable",
                               m.eta());
      break;
    case MeasureKind::fractional:
      // H = 1/2 is space-time white noise; rougher H gives a distribution.
      catalog_ok = m.hurst() == 0.5;
      rep.details.emplace_back(catalog_ok ? "dirac_delta" : "covariance_not_a_function",
                               m.hurst());
      break;
    case MeasureKind::custom_density:
      catalog_ok = m.h2_attested();
      rep.details.emplace_back(catalog_ok ? "attested" : "undetermined", 0.0);
      break;
  }
  rep.h2_ok = catalog_ok && dalang_ok;
  return rep;
}

TailCheck verify_tail_exponents(const SpectralMeasure& m, double tol) {
  TailCheck out;
  const TailSpec& t = m.tails();
  auto fit = [&](double lo) {
    // Least-squares slope of log f against log r over [lo, 100 lo].
    const int n = 21;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int i = 0; i < n; ++i) {
      const double r = lo * std::pow(100.0, static_cast<double>(i) / (n - 1));
      const double f = m.radial_density(r);
      if (!(f > 0.0) || !std::isfinite(f)) continue;
      const double x = std::log(r);
      const double y = std::log(f);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
    if (used < 3) return std::numeric_limits<double>::quiet_NaN();
    return (used * sxy - sx * sy) / (used * sxx - sx * sx);
  };
  if (t.r_min == 0.0) {
    out.slope_at_zero = fit(1e-6);
    out.ok = out.ok && std::abs(out.slope_at_zero - t.exponent_at_zero) <= tol;
  }
  if (std::isinf(t.r_max)) {
    out.slope_at_infinity = fit(1e4);
    out.ok = out.ok && std::abs(out.slope_at_infinity - t.exponent_at_infinity) <= tol;
  }
  return out;
}

double regularized_covariance_value(const SpectralMeasure& m, double eps, double radius) {
  require_eps(eps);
  radius = std::abs(radius);
  const double probe[] = {radius};
  const RadialNodes nodes = converged_nodes(m, eps, radius, probe);
  return synthesize(nodes, m.dim(), radius);
}

double regularized_covariance_value(const SpectralMeasure& m, double eps,
                                    std::span<const double> x) {
  require(static_cast<int>(x.size()) == m.dim(), ErrorCode::dimension_mismatch,
          "point has wrong dimension");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return regularized_covariance_value(m, eps, std::sqrt(r2));
}

std::vector<double> regularized_covariance_radii(const SpectralMeasure& m, double eps,
                                                 std::span<const double> radii) {
  require_eps(eps);
  double x_max = 0.0;
  for (double r : radii) x_max = std::max(x_max, std::abs(r));
  const double probes[] = {0.0, 0.25 * x_max, 0.5 * x_max, x_max};
  const RadialNodes nodes = converged_nodes(m, eps, x_max, probes);
  std::vector<double> out;
  out.reserve(radii.size());
  std::map<double, double> memo;
  for (double r : radii) {
    const double key = std::abs(r);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, synthesize(nodes, m.dim(), key)).first;
    out.push_back(it->second);
  }
  return out;
}

std::size_t UniformGrid::size() const {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(count);
  return n;
}

std::vector<double> regularized_covariance_grid(const SpectralMeasure& m, double eps,
                                                const UniformGrid& grid) {
  require(grid.dim == m.dim(), ErrorCode::dimension_mismatch, "grid dimension differs from measure");
  require(grid.count >= 1 && grid.step > 0.0, ErrorCode::parameter_out_of_range, "empty grid");
  const std::size_t total = grid.size();
  std::vector<double> radii(total);
  std::vector<int> idx(grid.dim, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    double r2 = 0.0;
    for (int d = grid.dim - 1; d >= 0; --d) {
      const int i = static_cast<int>(rem % grid.count);
      rem /= grid.count;
      const double x = grid.coordinate(i);
      r2 += x * x;
    }
    radii[k] = std::sqrt(r2);
  }
  return regularized_covariance_radii(m, eps, radii);
}

CovarianceKernel::CovarianceKernel(const SpectralMeasure& m, double eps, double max_radius,
                                   int table_size)
    : measure_(m), eps_(eps), closed_form_(m.kind() == MeasureKind::white_noise) {
  require_eps(eps);
  if (closed_form_) {
    origin_ = std::pow(4.0 * kPi * eps, -0.5);
    return;
  }
  require(table_size >= 8, ErrorCode::parameter_out_of_range, "table too small");
  max_radius_ = std::max(max_radius, 1e-12);
  step_ = max_radius_ / (table_size - 1);
  std::vector<double> radii(table_size + 2);
  for (int i = 0; i < table_size + 2; ++i) radii[i] = step_ * i;
  values_ = regularized_covariance_radii(m, eps, radii);
  origin_ = values_.front();
}

double CovarianceKernel::operator()(double radius) const {
  radius = std::abs(radius);
  if (closed_form_) return origin_ * std::exp(-radius * radius / (4.0 * eps_));
  if (radius > max_radius_) return regularized_covariance_value(measure_, eps_, radius);
  const double s = radius / step_;
  const int i = std::min(static_cast<int>(s), static_cast<int>(values_.size()) - 3);
  const double u = s - i;
  // Four-point Lagrange interpolation; the table is even in r, so index -1 mirrors index 1.
  const double ym1 = i == 0 ? values_[1] : values_[i - 1];
  const double y0 = values_[i];
  const double y1 = values_[i + 1];
  const double y2 = values_[i + 2];
  return y0 + 0.5 * u *
                  (y1 - ym1 + u * (2.0 * ym1 - 5.0 * y0 + 4.0 * y1 - y2 +
                                   u * (3.0 * (y0 - y1) + y2 - ym1)));
}

}  // namespace pam
