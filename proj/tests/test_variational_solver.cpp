#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pam/error.hpp"
#include "pam/variational_solver.hpp"

using namespace pam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

bool throws_code(auto&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// Bound state of -1/2 Delta_h - w delta_0 on the infinite lattice, w = a / h:
// psi_i = e^{-kappa |i| h} with sinh(kappa h) = a h and E = -(cosh(kappa h) - 1) / h^2.
double lattice_delta_well(double a, double h) {
  return -(std::sqrt(1.0 + a * a * h * h) - 1.0) / (h * h);
}

VariationalProblem white(int n, double lambda = 1.0) {
  VariationalProblem p;
  p.n = n;
  p.noise_scale = lambda;
  return p;
}

}  // namespace

TEST_CASE("centre-of-mass reduction") {
  auto r2 = reduce_center_of_mass(white(2));
  REQUIRE(r2.dim == 1);
  REQUIRE(r2.pairs.size() == 1);
  REQUIRE_THAT(r2.pairs[0].scale, WithinRel(std::sqrt(2.0), 1e-15));
  REQUIRE(r2.kinetic.size() == 1);
  REQUIRE(r2.kinetic[0].coef == 1.0);

  auto r3 = reduce_center_of_mass(white(3));
  REQUIRE(r3.dim == 2);
  REQUIRE(r3.pairs.size() == 3);
  REQUIRE(r3.kinetic.size() == 3);

  VariationalProblem planar;
  planar.n = 2;
  planar.ell = 2;
  planar.measure = SpectralMeasure::riesz(1.5, 2);
  planar.eps = 0.1;
  REQUIRE(reduce_center_of_mass(planar).dim == 2);

  REQUIRE(throws_code([] { reduce_center_of_mass(white(5)); }, ErrorCode::instance_too_large));
  planar.n = 3;
  REQUIRE(throws_code([&] { reduce_center_of_mass(planar); }, ErrorCode::instance_too_large));
  VariationalProblem rough;
  rough.measure = SpectralMeasure::fractional(0.3);
  REQUIRE(throws_code([&] { reduce_center_of_mass(rough); }, ErrorCode::invalid_regularization));
}

TEST_CASE("reduced delta well against the lattice oracle") {
  auto r = reduce_center_of_mass(white(2));
  for (double h : {0.1, 0.05}) {
    GridSpec g{20.0, static_cast<int>(std::lround(40.0 / h)) + 1};
    auto H = assemble_hamiltonian(r, g);
    auto ep = ground_energy(H.matrix, 1e-10, 200, 1, H.cell_volume);
    REQUIRE_THAT(ep.value, WithinAbs(lattice_delta_well(1.0 / std::sqrt(2.0), h), 1e-9));
  }
  // Continuum value -a^2/2 = -1/4 within 5% on L = 10, m = 401.
  auto H = assemble_hamiltonian(r, {10.0, 401});
  auto ep = ground_energy(H.matrix, 1e-10, 200, 1, H.cell_volume);
  REQUIRE_THAT(ep.value, WithinRel(-0.25, 0.05));
}

TEST_CASE("hamiltonian structure") {
  auto r3 = reduce_center_of_mass(white(3));
  auto H = assemble_hamiltonian(r3, {3.0, 31});
  REQUIRE(H.matrix.is_symmetric());
  REQUIRE(H.matrix.size == 29 * 29);

  VariationalProblem free = white(2, 0.0);
  auto Hf = assemble_hamiltonian(reduce_center_of_mass(free), {5.0, 801});
  auto ep = ground_energy(Hf.matrix, 1e-10, 200, 1, Hf.cell_volume);
  REQUIRE(ep.value >= 0.0);
  REQUIRE_THAT(ep.value, WithinRel(pi * pi / 200.0, 0.01));
  auto big = ground_energy(assemble_hamiltonian(reduce_center_of_mass(free), {20.0, 801}).matrix);
  REQUIRE(big.value < ep.value);

  VariationalProblem smooth = white(2);
  smooth.eps = 0.01;
  REQUIRE(throws_code([&] { assemble_hamiltonian(reduce_center_of_mass(smooth), {10.0, 101}); },
                      ErrorCode::grid_too_coarse));
  REQUIRE(throws_code([&] { assemble_hamiltonian(reduce_center_of_mass(white(2)), {10.0, 100}); },
                      ErrorCode::grid_too_coarse));
}

TEST_CASE("ground energy solver") {
  for (int n : {12, 600}) {
    SparseMatrix d;
    d.size = n;
    d.row_ptr.push_back(0);
    for (int i = 0; i < n; ++i) {
      d.cols.push_back(i);
      d.values.push_back(3.0 + std::cos(1.7 * i) + (i == n / 3 ? -5.0 : 0.0));
      d.row_ptr.push_back(i + 1);
    }
    double mn = INFINITY;
    for (double v : d.values) mn = std::min(mn, v);
    auto ep = ground_energy(d);
    REQUIRE_THAT(ep.value, WithinAbs(mn, 1e-12));
    REQUIRE(ep.vector[n / 3] > 0.0);
  }
  auto r = reduce_center_of_mass(white(3));
  auto H = assemble_hamiltonian(r, {4.0, 41});
  auto a = ground_energy(H.matrix, 1e-10, 200, 99, H.cell_volume);
  auto b = ground_energy(H.matrix, 1e-10, 200, 99, H.cell_volume);
  REQUIRE(a.value == b.value);
  REQUIRE(a.vector == b.vector);
  REQUIRE(a.residual <= 1e-10);
  double norm = 0.0;
  for (double v : a.vector) norm += v * v;
  REQUIRE_THAT(norm * H.cell_volume, WithinAbs(1.0, 1e-12));
}

TEST_CASE("real-space functional") {
  for (int n : {2, 3}) {
    auto p = white(n);
    p.eps = 0.04;
    auto r = reduce_center_of_mass(p);
    GridSpec g{5.0, 51};
    auto H = assemble_hamiltonian(r, g);
    auto ep = ground_energy(H.matrix, 1e-11, 200, 1, H.cell_volume);
    REQUIRE_THAT(energy_functional_real(ep.vector, r, g), WithinAbs(-ep.value, 1e-10));
    std::vector<double> unnorm = ep.vector;
    for (double& v : unnorm) v *= 1.01;
    REQUIRE(throws_code([&] { energy_functional_real(unnorm, r, g); }, ErrorCode::unnormalized_input));
  }
  // Zero interaction: the functional is minus the kinetic energy.
  auto free = reduce_center_of_mass(white(2, 0.0));
  GridSpec g{5.0, 101};
  std::vector<double> bump(99);
  double s = 0.0;
  for (int i = 0; i < 99; ++i) {
    bump[i] = std::exp(-std::pow(g.coordinate(i + 1) - 0.7, 2)) * (1.0 + 0.3 * std::sin(3.0 * i));
    s += bump[i] * bump[i];
  }
  for (double& v : bump) v /= std::sqrt(s * g.spacing());
  REQUIRE(energy_functional_real(bump, free, g) <= 0.0);

  // Nearly constant covariance: a band of mass concentrated at xi ~ 0.
  VariationalProblem flat;
  flat.measure = SpectralMeasure::power_band({1e7, 0.0, 0.0, 1e-7}, 1);
  flat.eps = 0.04;
  auto rf = reduce_center_of_mass(flat);
  std::vector<double> shifted(99, 0.0);
  for (int i = 0; i + 1 < 99; ++i) shifted[i + 1] = bump[i];
  double mass = 0.0;
  for (double v : shifted) mass += v * v;
  REQUIRE_THAT(mass * g.spacing(), WithinAbs(1.0, 1e-10));
  REQUIRE_THAT(energy_functional_real(shifted, rf, g), WithinAbs(energy_functional_real(bump, rf, g), 1e-8));
}

TEST_CASE("fourier functional: gaussian closed form") {
  auto r = reduce_center_of_mass(white(2));
  for (double a : {0.5, 1.3}) {
    FrequencyGrid fg{1, 801, 0.02 * std::sqrt(a)};
    std::vector<std::complex<double>> h(fg.count);
    double norm = 0.0;
    for (int i = 0; i < fg.count; ++i) {
      const double z = fg.coordinate(i);
      h[i] = std::exp(-z * z / (4.0 * a));
      norm += std::norm(h[i]);
    }
    for (auto& v : h) v /= std::sqrt(norm * fg.step);
    REQUIRE_THAT(energy_functional_fourier(h, fg, r), WithinAbs(std::sqrt(a / pi) - a / 2.0, 1e-4));
    auto free = reduce_center_of_mass(white(2, 0.0));
    REQUIRE_THAT(energy_functional_fourier(h, fg, free), WithinAbs(-a / 2.0, 1e-8));
    for (auto& v : h) v *= std::complex<double>(0.0, 1.0);
    REQUIRE(throws_code([&] { energy_functional_fourier(h, fg, r); }, ErrorCode::symmetry_violation));
  }
}

TEST_CASE("real-space and fourier functionals agree at the maximizer") {
  struct Case {
    VariationalProblem p;
    GridSpec grid;
    FrequencyGrid freq;
  };
  std::vector<Case> cases;
  {
    Case c{white(2), {10.0, 801}, {1, 801, pi / 10.0}};
    cases.push_back(c);
  }
  {
    Case c{white(2), {8.0, 321}, {1, 321, pi / 8.0}};
    c.p.measure = SpectralMeasure::fractional(0.3);
    c.p.eps = 0.01;
    cases.push_back(c);
  }
  {
    Case c{white(2), {8.0, 321}, {1, 321, pi / 8.0}};
    c.p.measure = SpectralMeasure::riesz(1.0, 1);
    c.p.eps = 0.01;
    cases.push_back(c);
  }
  {
    Case c{white(2), {4.0, 41}, {2, 81, pi / 8.0}};
    c.p.ell = 2;
    c.p.measure = SpectralMeasure::riesz(1.5, 2);
    c.p.eps = 0.16;
    cases.push_back(c);
  }
  {
    Case c{white(3), {4.0, 41}, {2, 81, pi / 8.0}};
    c.p.eps = 0.16;
    cases.push_back(c);
  }
  for (auto& c : cases) {
    auto r = reduce_center_of_mass(c.p);
    auto H = assemble_hamiltonian(r, c.grid);
    auto ep = ground_energy(H.matrix, 1e-10, 200, 1, H.cell_volume);
    const double real = energy_functional_real(ep.vector, r, c.grid);
    auto h = to_frequency(ep.vector, c.grid, r.dim, c.freq);
    const double fourier = energy_functional_fourier(h, c.freq, r);
    INFO("n = " << c.p.n << ", l = " << c.p.ell << ", measure " << to_string(c.p.measure.kind()));
    REQUIRE_THAT(fourier, WithinRel(real, 0.02));
  }
}

TEST_CASE("extrapolated white-noise values") {
  const double e0[] = {0.0};
  GridSchedule s{{10.0, 15.0, 20.0}, {0.1, 0.05, 0.025}};
  auto e2 = solve_En(white(2), s, e0);
  REQUIRE(e2.verdict == "extrapolated");
  REQUIRE_THAT(e2.value, WithinAbs(0.25, 1e-6));
  REQUIRE(e2.raw_values.size() == 9);
  REQUIRE_THAT(e2.maximizer_norm_check, WithinAbs(1.0, 1e-12));
  REQUIRE(e2.boundary_mass < 1e-8);

  // Brute-force check of the lambda^2 scaling.
  auto e2l = solve_En(white(2, 2.0), {{5.0, 7.5, 10.0}, {0.05, 0.025, 0.0125}}, e0);
  REQUIRE_THAT(e2l.value, WithinAbs(1.0, 1e-5));

  double prev = 0.0;
  for (double lam : {0.5, 1.0, 1.5}) {
    auto e = solve_En(white(2, lam), s, e0);
    REQUIRE(e.value >= prev);
    prev = e.value;
  }

  auto e3 = solve_En(white(3), {{6.0, 8.0, 10.0}, {0.2, 0.1, 0.05}}, e0);
  REQUIRE_THAT(e3.value, WithinAbs(1.0, 1e-3));
  REQUIRE(e2.value / 2.0 <= e3.value / 3.0 + e2.error_bar + e3.error_bar);
}

TEST_CASE("regularized problems and eps extrapolation") {
  VariationalProblem p;
  p.measure = SpectralMeasure::riesz(0.5, 1);
  const double eps[] = {0.04, 0.02, 0.01};
  auto e = solve_En(p, {{8.0, 12.0, 16.0}, {0.1, 0.05, 0.025}}, eps);
  REQUIRE(e.verdict == "extrapolated");
  REQUIRE(e.warnings.empty());
  double finest = 0.0;
  for (auto& rv : e.raw_values)
    if (rv.eps == 0.01 && rv.spacing == 0.025 && rv.half_width == 16.0) finest = -rv.eigenvalue;
  REQUIRE(e.value >= finest);
  REQUIRE(e.value - finest <= 2.0 * e.error_bar);

  // Increments that grow as eps shrinks have no convergent tail to accelerate.
  p.measure = SpectralMeasure::fractional(0.3);
  auto rough = solve_En(p, {{6.0, 8.0, 10.0}, {0.1, 0.05, 0.025}}, eps);
  REQUIRE(rough.verdict == "unextrapolated");
  REQUIRE(rough.value == -rough.raw_values.back().eigenvalue);

  const double fixed[] = {0.25};
  auto ef = solve_En(white(2), {{6.0, 8.0, 10.0}, {0.2, 0.1, 0.05}}, fixed);
  REQUIRE(ef.value < 0.25);
  REQUIRE(ef.value > 0.1);

  const double two[] = {0.1, 0.05};
  REQUIRE(throws_code([&] { solve_En(p, {{6.0, 8.0, 10.0}, {0.1, 0.05, 0.025}}, two); },
                      ErrorCode::insufficient_points));
  REQUIRE(throws_code([&] { solve_En(p, {{6.0, 8.0}, {0.1, 0.05, 0.025}}, eps); },
                      ErrorCode::insufficient_points));
  const double coarse[] = {0.001};
  REQUIRE(throws_code([&] { solve_En(p, {{6.0, 8.0, 10.0}, {0.1, 0.05, 0.025}}, coarse); },
                      ErrorCode::grid_too_coarse));
}

TEST_CASE("single-function problem") {
  auto wn = SpectralMeasure::white_noise();
  for (double lam : {1.0, 2.0}) {
    auto r = solve_EH(wn, lam, 0.0, {20.0, 1601});
    REQUIRE_THAT(r.value, WithinRel(lam * lam / 12.0, 1e-4));
  }
  REQUIRE(solve_EH(wn, 0.0, 0.0, {20.0, 401}).value == 0.0);
  double prev = INFINITY;
  for (double lam : {0.8, 0.4, 0.2}) {
    const double v = solve_EH(wn, lam, 0.0, {60.0, 1201}).value;
    REQUIRE(v < prev);
    prev = v;
  }
  REQUIRE(prev < 0.004);
  // Smoothed kernels lower the value.
  auto smooth = solve_EH(wn, 1.0, 0.04, {20.0, 401});
  REQUIRE(smooth.value < 1.0 / 12.0);
  REQUIRE(smooth.value > 0.0);
  REQUIRE(throws_code([&] { solve_EH(SpectralMeasure::riesz(1.0, 2), 1.0, 0.1, {5.0, 41}); },
                      ErrorCode::dimension_mismatch));
  // Left half of the hypercontractive sandwich for q = 2.
  REQUIRE(solve_EH(wn, 1.0, 0.0, {20.0, 801}).value / 2.0 <= 0.25 / 2.0);
}
