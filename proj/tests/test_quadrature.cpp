#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "pam/error.hpp"
#include "pam/extrapolation.hpp"
#include "pam/quadrature.hpp"
#include "pam/rng.hpp"

using namespace pam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (std::size_t n : {1u, 2u, 5u, 20u, 40u}) {
    const GaussRule& r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    REQUIRE_THAT(wsum, WithinAbs(2.0, 1e-14));
    // x^{2n-2} integrates to 2/(2n-1).
    const int deg = 2 * static_cast<int>(n) - 2;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    REQUIRE_THAT(s, WithinRel(2.0 / (deg + 1), 1e-13));
  }
}

TEST_CASE("adaptive quadrature") {
  auto q = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  REQUIRE(q.converged);
  REQUIRE_THAT(q.value, WithinRel(2.0 / 3.0, 1e-10));
  auto osc = integrate_adaptive([](double x) { return std::cos(40.0 * x); }, 0.0, std::numbers::pi / 4);
  REQUIRE_THAT(osc.value, WithinAbs(std::sin(10.0 * std::numbers::pi) / 40.0, 1e-12));
}

TEST_CASE("golden section finds interior maxima") {
  const double x = golden_section_max([](double s) { return -(s - 0.3) * (s - 0.3); }, -2.0, 2.0, 1e-9);
  REQUIRE_THAT(x, WithinAbs(0.3, 1e-6));
  const double y = golden_section_max([](double s) { return s * std::exp(-s); }, 0.0, 10.0, 1e-9);
  REQUIRE_THAT(y, WithinAbs(1.0, 1e-6));
}

TEST_CASE("trapezoid weights") {
  auto w = trapezoid_weights(4, 2.0);
  REQUIRE(w.size() == 5);
  REQUIRE(w[0] == 0.25);
  REQUIRE(w[2] == 0.5);
}

TEST_CASE("richardson removes even powers of h") {
  const double hs[] = {0.4, 0.2, 0.1};
  double vals[3];
  for (int i = 0; i < 3; ++i) vals[i] = 1.5 + 0.7 * hs[i] * hs[i] - 2.0 * std::pow(hs[i], 4);
  const double orders[] = {2.0, 4.0};
  auto r = richardson(hs, vals, orders);
  REQUIRE_THAT(r.value, WithinAbs(1.5, 1e-13));
  REQUIRE_THROWS_AS(richardson(std::span<const double>(hs, 2), std::span<const double>(vals, 3)), Error);
}

TEST_CASE("aitken acceleration") {
  // a + b q^k is reproduced exactly.
  const double q = 0.37;
  double v[4];
  for (int k = 0; k < 4; ++k) v[k] = 2.0 - 0.5 * std::pow(q, k);
  auto r = aitken(v);
  REQUIRE_THAT(r.value, WithinAbs(2.0, 1e-14));
  REQUIRE(r.ok);
  // a + b eps^p on a geometric eps schedule.
  double e[3];
  for (int k = 0; k < 3; ++k) e[k] = 1.0 - 3.0 * std::pow(0.1 * std::pow(0.5, k), 0.6);
  REQUIRE_THAT(aitken(e).value, WithinAbs(1.0, 1e-12));
  // Diverging increments are flagged.
  const double bad[] = {1.0, 2.0, 4.0};
  REQUIRE_FALSE(aitken(bad).ok);
  // Converged sequences are returned as is.
  const double flat[] = {1.0, 1.0 + 1e-12, 1.0};
  auto f = aitken(flat, 1e-9);
  REQUIRE(f.ok);
  REQUIRE(f.value == 1.0);
  const double two[] = {1.0, 2.0};
  REQUIRE_THROWS_AS(aitken(two), Error);
}

TEST_CASE("counter-based streams") {
  Xoshiro256 a(42, 7);
  Xoshiro256 b(42, 7);
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t idx = 0; idx < 1000; ++idx) firsts.insert(Xoshiro256(42, idx)());
  REQUIRE(firsts.size() == 1000);
  Xoshiro256 u(3);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    mean += x;
  }
  REQUIRE_THAT(mean / 100000, WithinAbs(0.5, 0.005));
}
