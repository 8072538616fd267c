#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "pam/asymptotics.hpp"
#include "pam/error.hpp"
#include "pam/quadrature.hpp"

using namespace pam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const double inf = std::numeric_limits<double>::infinity();
const double pi = std::numbers::pi;
}  // namespace

TEST_CASE("growth indices") {
  REQUIRE(growth_lower(2, 0.25) == 0.5);
  REQUIRE(growth_lower(2, 0.0) == 0.0);
  REQUIRE_THAT(growth_lower(3, 1.0), WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));
  REQUIRE_THROWS_AS(growth_lower(2, -0.1), Error);
  REQUIRE(growth_upper(2, 0.25, inf) == 0.5);
  REQUIRE_THAT(growth_upper(2, 0.25, 0.1), WithinAbs(1.3, 1e-14));
  REQUIRE(growth_upper(2, 0.0, 0.3) == 0.0);
  for (double bs : {0.05, 0.2, 0.49, 0.5, 0.7, 3.0}) {
    const double lo = growth_lower(2, 0.25), up = growth_upper(2, 0.25, bs);
    REQUIRE(lo <= up);
    if (bs >= 0.5) REQUIRE(lo == up);
    else REQUIRE(up > lo);
  }
}

TEST_CASE("exponential initial data") {
  auto [a, b] = growth_exponential_case(2, 0.25, 0.2);
  REQUIRE_THAT(a, WithinAbs(0.725, 1e-15));
  REQUIRE(a == b);
  REQUIRE(growth_exponential_case(2, 0.25, 1.0).first == 0.5);
  // continuity at beta = sqrt(2 En / n)
  const double star = std::sqrt(2.0 * 0.7 / 3.0);
  REQUIRE_THAT(0.5 * star + 0.7 / (3.0 * star), WithinAbs(growth_exponential_case(3, 0.7, star).first, 1e-15));
  REQUIRE_THAT(growth_exponential_case(3, 0.7, std::nextafter(star, 0.0)).first, WithinAbs(star, 1e-12));
  REQUIRE_THROWS_AS(growth_exponential_case(2, 0.25, 0.0), Error);

  const double betas[] = {0.3};
  auto rep = growth_index(2, 0.25, 0.0, GrowthRegime::exponential, betas);
  REQUIRE(rep.equal);
  auto comp = growth_index(2, 0.25, 0.0, GrowthRegime::compact);
  REQUIRE(comp.lower_star == 0.5);
  REQUIRE(comp.equal);
  const double set[] = {0.1, 0.2};
  auto gen = growth_index(2, 0.25, 0.0, GrowthRegime::generic, set);
  REQUIRE(gen.lower_star < gen.upper_star);
  REQUIRE_FALSE(gen.equal);
}

TEST_CASE("laplace rate closed form") {
  REQUIRE(ldev_rate(2.0, 1.0, 2) == -3.0);
  REQUIRE(ldev_rate(0.5, 1.0, 3) == -0.375);
  // continuity at alpha = beta
  for (double b : {0.3, 1.0, 2.5})
    REQUIRE_THAT(ldev_rate(b, b, 2), WithinAbs(ldev_rate(std::nextafter(b, 10.0), b, 2), 1e-12));
}

TEST_CASE("laplace rate by strip quadrature") {
  for (auto [a, b] : {std::pair{2.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}}) {
    const double exact = ldev_rate(a, b, 2);
    const double tol[] = {0.15, 0.08, 0.05};
    double prev = inf;
    int k = 0;
    for (double t : {50.0, 100.0, 200.0}) {
      const double v = ldev_numeric(a, b, 2, 1.0, t);
      const double rel = std::abs(v - exact) / std::abs(exact);
      INFO("alpha=" << a << " beta=" << b << " t=" << t << " v=" << v);
      REQUIRE(rel <= tol[k++]);
      REQUIRE(rel <= prev + 1e-12);
      prev = rel;
    }
  }
  // large beta approaches -n alpha^2 / 2
  // the prefactor 1/beta^n costs n log(beta) / t
  REQUIRE_THAT(ldev_numeric(0.5, 50.0, 2, 1.0, 2000.0), WithinRel(-0.25, 0.05));
  REQUIRE_THAT(ldev_numeric(0.5, 50.0, 2, 1.0, 200.0) + 2.0 * std::log(50.0) / 200.0, WithinRel(-0.25, 0.02));
  // n = 3 and n = 1
  REQUIRE_THAT(ldev_numeric(2.0, 1.0, 3, 1.0, 400.0), WithinRel(ldev_rate(2.0, 1.0, 3), 0.05));
  REQUIRE_THAT(ldev_numeric(2.0, 1.0, 1, 1.0, 400.0), WithinRel(ldev_rate(2.0, 1.0, 1), 0.05));
  REQUIRE_THROWS_AS(ldev_numeric(2.0, 1.0, 4, 1.0, 200.0), Error);
  REQUIRE_THROWS_AS(ldev_numeric(2.0, 1.0, 2, 1.0, 10.0), Error);
}

TEST_CASE("strip integral against plain two-dimensional quadrature") {
  // n = 2, direct integration over y1 >= 0, |y2 - y1| <= M, y2 >= 0
  const double a = 1.0, b = 0.5, M = 1.0, t = 50.0;
  auto f = [&](double y1, double y2) {
    return std::exp(-((y1 - a * t) * (y1 - a * t) + (y2 - a * t) * (y2 - a * t)) / (2 * t) - b * (y1 + y2) +
                    2 * (a * b - 0.5 * b * b) * t);
  };
  AdaptiveOptions o{.abs_tol = 1e-14, .rel_tol = 1e-10};
  auto outer = [&](double y1) {
    return integrate_adaptive([&](double y2) { return f(y1, y2); }, std::max(0.0, y1 - M), y1 + M, o).value;
  };
  const double c = (a - b) * t;
  const double direct = integrate_adaptive(outer, 0.0, c + 20 * std::sqrt(t), o).value;
  const double logv = std::log(direct) / t - 2 * (a * b - 0.5 * b * b);
  REQUIRE_THAT(ldev_numeric(a, b, 2, M, t), WithinAbs(logv, 1e-8));
}

TEST_CASE("phase predicates") {
  auto r1 = phase_predicate(SpectralMeasure::riesz(1.0, 1));
  REQUIRE(r1.occurs == Verdict::no);
  REQUIRE(std::isinf(r1.criterion_value));
  auto r2 = phase_predicate(SpectralMeasure::riesz(1.5, 2));
  REQUIRE(r2.occurs == Verdict::no);
  REQUIRE(r2.hypothesis == "H.2");
  REQUIRE(r2.lambda2c_upper == 0.0);

  auto band = phase_predicate(SpectralMeasure::power_band({1.0, 0.0, 1.0, inf}, 1));
  REQUIRE(band.occurs == Verdict::yes);
  REQUIRE(band.criterion_value == 2.0);
  REQUIRE_THAT(band.lambdanc_upper, WithinRel(pi * std::numbers::e / 2.0, 1e-15));
  // sup_s sqrt(pi s) erfc(sqrt s)
  const double sup = std::sqrt(pi * band.argmax_s) * std::erfc(std::sqrt(band.argmax_s));
  double scan = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double s = std::exp(-6.0 + 12.0 * i / 4000);
    scan = std::max(scan, std::sqrt(pi * s) * std::erfc(std::sqrt(s)));
  }
  REQUIRE_THAT(sup, WithinRel(scan, 1e-6));
  REQUIRE_THAT(band.lambda2c_upper, WithinRel(2.0 * pi / (4.0 * scan), 1e-6));

  auto low = phase_predicate(SpectralMeasure::power_band({1.0, 0.0, 0.0, 1.0}, 1));
  REQUIRE(low.occurs == Verdict::no);
  REQUIRE(std::isinf(low.criterion_value));

  auto wn = phase_predicate(SpectralMeasure::white_noise());
  REQUIRE(wn.occurs == Verdict::no);
}

TEST_CASE("phase verdict under mass added near the origin") {
  // no -> stays no when mass with a non-integrable 1/|xi|^2 singularity is added
  auto far = SpectralMeasure::power_band({1.0, 0.0, 2.0, inf}, 1);
  auto near = SpectralMeasure::custom(
      [](double r) { return (r >= 2.0 ? 1.0 : 0.0) + (r <= 1.0 ? std::pow(r, -0.5) : 0.0); },
      TailSpec{0.0, inf, -0.5, 0.0}, 1);
  REQUIRE(phase_predicate(far).occurs == Verdict::yes);
  REQUIRE(phase_predicate(near).occurs == Verdict::no);
  auto base = SpectralMeasure::power_band({1.0, 0.0, 0.0, 1.0}, 1);
  auto more = SpectralMeasure::custom([](double r) { return r <= 1.0 ? 2.0 : 0.0; },
                                      TailSpec{0.0, 1.0, 0.0, 0.0}, 1);
  REQUIRE(phase_predicate(base).occurs == Verdict::no);
  REQUIRE(phase_predicate(more).occurs == Verdict::no);
  // larger criterion, smaller bound
  auto a = phase_predicate(SpectralMeasure::power_band({1.0, 0.0, 1.0, inf}, 1));
  auto b = phase_predicate(SpectralMeasure::power_band({3.0, 0.0, 1.0, inf}, 1));
  REQUIRE(b.criterion_value > a.criterion_value);
  REQUIRE(b.lambdanc_upper < a.lambdanc_upper);
}

TEST_CASE("phase predicate under H.1 alone") {
  // f = c |xi|^{0.4}: H.1 holds, the sufficient integral diverges at 0
  auto frac = phase_predicate(SpectralMeasure::fractional(0.3));
  REQUIRE(frac.hypothesis == "H.1");
  REQUIRE(frac.occurs == Verdict::undetermined);
  REQUIRE(frac.h1_criterion_value.has_value());
}

TEST_CASE("finite time diagnostics") {
  auto make = [](double t, double log_mean, double se) {
    MCEstimate e;
    e.t = t;
    e.n = 2;
    e.eps = 0.1;
    e.log_mean = log_mean;
    e.std_err = se;
    return DiagnosticInput{e, 0.0, 0.0};
  };
  // zero interaction: ratio 1
  std::vector<DiagnosticInput> zero{make(2, 0, 0), make(4, 0, 0), make(8, 0, 0)};
  auto z = finite_t_diagnostics(2, 0.0, 0.0, zero);
  REQUIRE_FALSE(z.any_violation);
  REQUIRE(z.rows[1].upper_lhs == 0.0);

  // consistent growth with a positive prefactor
  std::vector<DiagnosticInput> ok{make(2, 0.3 + 0.5, 0.01), make(4, 0.3 + 1.0, 0.01), make(8, 0.3 + 2.0, 0.02)};
  auto g = finite_t_diagnostics(2, 0.25, 0.001, ok);
  REQUIRE_THAT(g.slack_upper, WithinAbs(0.3, 1e-12));
  REQUIRE_FALSE(g.any_violation);

  // growth well above En is flagged
  std::vector<DiagnosticInput> bad{make(2, 1.0, 0.01), make(4, 2.0, 0.01), make(8, 4.0, 0.01)};
  auto v = finite_t_diagnostics(2, 0.25, 0.001, bad);
  REQUIRE(v.rows.back().upper_violation);

  std::vector<DiagnosticInput> mixed{make(2, 0, 0), make(4, 0, 0)};
  mixed[1].estimate.n = 3;
  REQUIRE_THROWS_AS(finite_t_diagnostics(2, 0.25, 0.0, mixed), Error);
  REQUIRE_THAT(log_strip_mass_pair(1.0, 2.0), WithinAbs(std::log(std::erf(1.0)), 1e-15));
}
