#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pam {

enum class MeasureKind { white_noise, riesz, fractional, custom_density };

std::string to_string(MeasureKind kind);

/// Declared support and power-law behaviour of a radial spectral density.
/// f(r) ~ r^exponent_at_zero as r -> 0 (only meaningful when r_min == 0) and
/// f(r) ~ r^exponent_at_infinity as r -> inf (only meaningful when r_max == inf).
struct TailSpec {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
  double exponent_at_zero = 0.0;
  double exponent_at_infinity = 0.0;
};

/// f(r) = coef * r^exponent on r_min <= r <= r_max, zero elsewhere.
struct PowerBand {
  double coef = 1.0;
  double exponent = 0.0;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();
};

struct MeasureParams {
  double eta = 0.0;    // riesz
  double hurst = 0.0;  // fractional
  PowerBand band{};    // custom_density given as a power band
  bool h2_attested = false;
};

/// Spectral measure mu(dxi) = f(|xi|) dxi on R^dim with a radial density.
/// Fourier convention: F u(xi) = int e^{-i xi.x} u(x) dx, so that
/// gamma(x) = (2 pi)^{-dim} int e^{i xi.x} mu(dxi).
class SpectralMeasure {
 public:
  static SpectralMeasure white_noise();
  static SpectralMeasure riesz(double eta, int dim);
  static SpectralMeasure fractional(double hurst);
  static SpectralMeasure power_band(const PowerBand& band, int dim, bool h2_attested = false);
  /// Arbitrary radial density with declared tails. Positivity of the inverse
  /// transform can only be attested, never checked.
  static SpectralMeasure custom(std::function<double(double)> radial_density, const TailSpec& tails,
                                int dim, bool h2_attested = false);

  MeasureKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const TailSpec& tails() const { return tails_; }
  const std::optional<PowerBand>& band() const { return band_; }
  bool h2_attested() const { return h2_attested_; }
  double eta() const { return eta_; }
  double hurst() const { return hurst_; }
  /// Multiplier in front of the power law (C(l, eta) for riesz, c_{1,H} for fractional).
  double normalization() const { return band_ ? band_->coef : 1.0; }

  double radial_density(double r) const;
  double density(std::span<const double> xi) const;

 private:
  SpectralMeasure() = default;

  MeasureKind kind_ = MeasureKind::white_noise;
  int dim_ = 1;
  TailSpec tails_{};
  std::optional<PowerBand> band_;
  std::function<double(double)> profile_;
  bool h2_attested_ = false;
  double eta_ = 0.0;
  double hurst_ = 0.0;
};

SpectralMeasure make_spectral_measure(MeasureKind kind, const MeasureParams& params, int dim);

/// C(l, eta) with F(|x|^{-eta}) = C |xi|^{eta - l}, valid for 0 < eta < l.
double riesz_normalization(int dim, double eta);
/// c_{1,H} = Gamma(2H + 1) sin(pi H).
double fractional_normalization(double hurst);
/// Surface area of the unit sphere S^{dim-1}; equals 2 for dim = 1.
double unit_sphere_area(int dim);

/// Weight w(r) multiplying the density inside a radial integral, together with
/// its power-law exponents at 0 and infinity. `gaussian_eps > 0` marks a weight
/// carrying the factor e^{-eps r^2}, which dominates at infinity.
struct RadialWeight {
  std::function<double(double)> w;
  double exponent_at_zero = 0.0;
  double exponent_at_infinity = 0.0;
  double gaussian_eps = 0.0;
  /// Integrate f(r)^power instead of f(r).
  int density_power = 1;
  /// Set when w(r) = r^q exactly; enables the closed form for power bands.
  std::optional<double> pure_power;
};

/// Symbolic finiteness of int_{R^l} f(|xi|)^p w(|xi|) dxi from the declared tails.
bool radial_integral_finite(const SpectralMeasure& m, const RadialWeight& weight);
/// Value of the integral above; +inf when the tails make it diverge.
double radial_integral(const SpectralMeasure& m, const RadialWeight& weight);

struct HypothesisReport {
  bool dalang_ok = false;
  double dalang_value = std::numeric_limits<double>::infinity();
  bool h1a_ok = false;
  bool h1b_ok = false;
  bool h2_ok = false;
  double kappa_estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, double>> details;
};

struct QuadratureSpec {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
};

/// (finite?, int mu(dxi)/(1 + |xi|^2)); the verdict comes from the tails only.
std::pair<bool, double> check_dalang(const SpectralMeasure& m, const QuadratureSpec& quad = {});
HypothesisReport check_h1(const SpectralMeasure& m, std::span<const double> probe_grid,
                          double kappa_max);
HypothesisReport check_h2(const SpectralMeasure& m);

struct TailCheck {
  bool ok = true;
  double slope_at_zero = std::numeric_limits<double>::quiet_NaN();
  double slope_at_infinity = std::numeric_limits<double>::quiet_NaN();
};
/// Log-log regression of the density over two decades at each end of the
/// support; ok iff each fitted slope is within `tol` of the declared exponent.
TailCheck verify_tail_exponents(const SpectralMeasure& m, double tol = 0.05);

/// gamma_eps(x) = (2 pi)^{-l} int e^{-eps |xi|^2} e^{i xi.x} mu(dxi).
double regularized_covariance_value(const SpectralMeasure& m, double eps, std::span<const double> x);
double regularized_covariance_value(const SpectralMeasure& m, double eps, double radius);

/// gamma_eps at many radii from one shared quadrature node set.
std::vector<double> regularized_covariance_radii(const SpectralMeasure& m, double eps,
                                                 std::span<const double> radii);

/// Uniform lattice: `count` points per axis starting at `lower` with spacing `step`.
struct UniformGrid {
  int dim = 1;
  double lower = 0.0;
  double step = 1.0;
  int count = 1;
  double coordinate(int i) const { return lower + step * i; }
  std::size_t size() const;
};

/// Values of gamma_eps on the lattice, row-major with the last axis fastest.
std::vector<double> regularized_covariance_grid(const SpectralMeasure& m, double eps,
                                                const UniformGrid& grid);

/// gamma_eps as a function of |x|, tabulated once for repeated evaluation.
/// White noise uses the closed-form heat kernel; other measures interpolate a
/// cubic table on [0, max_radius] and fall back to quadrature beyond.
class CovarianceKernel {
 public:
  CovarianceKernel(const SpectralMeasure& m, double eps, double max_radius, int table_size = 4096);
  double operator()(double radius) const;
  double at_origin() const { return origin_; }
  double eps() const { return eps_; }

 private:
  SpectralMeasure measure_;
  double eps_;
  bool closed_form_;
  double max_radius_ = 0.0;
  double step_ = 0.0;
  double origin_ = 0.0;
  std::vector<double> values_;
};

}  // namespace pam
