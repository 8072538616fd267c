#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pam/feynman_kac.hpp"
#include "pam/spectral_models.hpp"

namespace pam {

/// sqrt(2 En / n).
double growth_lower(int n, double En);
/// inf over beta in (0, beta_sup) of beta/2 + En/(n beta); beta_sup may be +inf.
double growth_upper(int n, double En, double beta_sup);
/// Both speeds for u0 comparable to e^{-beta |x|}: beta/2 + En/(n beta) below
/// sqrt(2 En / n), sqrt(2 En / n) above.
std::pair<double, double> growth_exponential_case(int n, double En, double beta);

enum class GrowthRegime { compact, exponential, generic };

struct GrowthIndexReport {
  int n = 2;
  double En = 0.0;
  double En_err = 0.0;
  double lower_star = 0.0;
  double upper_star = 0.0;
  GrowthRegime regime = GrowthRegime::compact;
  std::vector<double> betas;  // exponential: one rate; generic: rates bounding u0
  bool equal = false;
};

/// compact: beta_sup = inf; exponential: betas = {beta}; generic: beta_sup = max(betas).
GrowthIndexReport growth_index(int n, double En, double En_err, GrowthRegime regime,
                               std::span<const double> betas = {});

/// lim (1/t) log int_{A_M^+} exp{-sum_j (|y^j - alpha t e_1|^2 / (2t) + beta |y^j|)} dy.
double ldev_rate(double alpha, double beta, int n);

struct LdevOptions {
  int gauss_points = 24;  // per strip coordinate
  double rel_tol = 1e-9;  // agreement between gauss_points and 2 gauss_points
};

/// (1/t) log of the same integral at finite t, l = 1, n <= 3. The strip
/// coordinates v^j = y^j - y^1 are integrated by Gauss-Legendre and the free
/// coordinate y^1 in closed form through a logarithmic erfc.
double ldev_numeric(double alpha, double beta, int n, double M, double t, const LdevOptions& opts = {});

enum class Verdict { yes, no, undetermined };
std::string to_string(Verdict v);

struct PhaseReport {
  Verdict occurs = Verdict::undetermined;
  /// "H.2", "H.1", or "assumed" when neither hypothesis could be confirmed and
  /// the criterion integral is applied to the declared tails anyway.
  std::string hypothesis;
  double criterion_value = std::numeric_limits<double>::infinity();  // int mu(dxi) / |xi|^2
  double lambdanc_upper = std::numeric_limits<double>::infinity();
  /// l (2 pi)^l / (4 sup_s s int e^{-s|xi|^2} mu(dxi)); 0 when the supremum is infinite.
  double lambda2c_upper = std::numeric_limits<double>::infinity();
  double argmax_s = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> h1_criterion_value;  // int (f + f^2) / |xi|^2, l = 1
};

PhaseReport phase_predicate(const SpectralMeasure& m);

/// One moment estimate entering the diagnostics. log_heat = log prod_j (p_t * u0)(x^j)
/// (0 for u0 = 1); log_strip = log int_{A_M} prod_j p_t(y^j) u0(x^j + y^j) dy.
struct DiagnosticInput {
  MCEstimate estimate;
  double log_heat = 0.0;
  double log_strip = 0.0;
};

struct DiagnosticRow {
  double t = 0.0;
  double upper_lhs = 0.0;  // (1/t) log(moment / heat)
  double lower_lhs = 0.0;  // (1/t) log(moment / strip)
  double lhs_err = 0.0;
  double upper_bound = 0.0;  // En + c / t
  double lower_bound = 0.0;  // En - c' / t
  bool upper_violation = false;
  bool lower_violation = false;
};

struct DiagnosticsReport {
  int n = 2;
  double En = 0.0;
  double En_err = 0.0;
  double slack_upper = 0.0;  // c
  double slack_lower = 0.0;  // c'
  std::vector<DiagnosticRow> rows;
  bool any_violation = false;
};

/// Compares (1/t) log moments with En at the observed times. The slack c is the
/// positive part of the intercept of a least-squares line through
/// log(moment / heat) against t, and c' the positive part of minus the intercept
/// for the strip ratio. A violation is a miss by more than 3 combined errors.
DiagnosticsReport finite_t_diagnostics(int n, double En, double En_err, std::span<const DiagnosticInput> inputs);

/// log int_{A_M} prod_j p_t(y^j) dy for n = 2 on the line: log erf(M / (2 sqrt t)).
double log_strip_mass_pair(double t, double M);

}  // namespace pam
