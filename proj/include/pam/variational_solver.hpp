#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pam/eigensolver.hpp"
#include "pam/spectral_models.hpp"

namespace pam {

/// sup_g { lambda int Gamma_eps g^2 - 1/2 int |grad g|^2 } over unit g on (R^l)^n,
/// Gamma the pair sum of gamma(x^j - x^k).
struct VariationalProblem {
  int n = 2;
  int ell = 1;
  SpectralMeasure measure = SpectralMeasure::white_noise();
  double noise_scale = 1.0;
  /// 0 only for white noise (on-site delta).
  double eps = 0.0;
};

/// Kinetic term 1/2 * coef * (offset . grad)^2, offset an integer lattice vector.
struct KineticDirection {
  std::vector<int> offset;
  double coef = 1.0;
};

/// A pair difference x^j - x^k = A y in reduced coordinates y, A of shape l x d.
/// For l = 1 the row is scale * stencil with stencil entries in {-1, 0, 1}, which
/// places the coincidence set stencil . y = 0 on lattice nodes.
struct PairMap {
  std::vector<double> matrix;  // row-major l x d
  std::vector<int> stencil;    // l = 1 only
  double scale = 1.0;
};

struct ReducedProblem {
  int n = 2;
  int ell = 1;
  int dim = 1;  // (n - 1) * l
  std::vector<KineticDirection> kinetic;
  std::vector<PairMap> pairs;
  SpectralMeasure measure = SpectralMeasure::white_noise();
  double noise_scale = 1.0;
  double eps = 0.0;
};

/// Removes the centre of mass. n = 2 uses v = (x^1 - x^2)/sqrt(2), so the pair
/// term is gamma(sqrt(2) v) and the kinetic coefficient stays 1/2. n = 3, l = 1
/// uses y_j = x^j - x^3, whose kinetic form is
/// 1/2 [(d_1 g)^2 + (d_2 g)^2 + ((d_1 + d_2) g)^2].
/// Instances with (n - 1) l > 2 are rejected as instance-too-large.
ReducedProblem reduce_center_of_mass(const VariationalProblem& p);

/// Cube [-L, L]^d with m points per axis including the two Dirichlet boundary
/// nodes, so h = 2L / (m - 1) and the unknowns are the (m - 2)^d interior nodes.
struct GridSpec {
  double half_width = 10.0;
  int points_per_axis = 401;
  double spacing() const { return 2.0 * half_width / (points_per_axis - 1); }
  /// Coordinate of node i, symmetric about 0 bit for bit.
  double coordinate(int i) const { return (i - 0.5 * (points_per_axis - 1)) * spacing(); }
};

struct Hamiltonian {
  SparseMatrix matrix;
  std::vector<double> potential;  // lambda * Gamma_eps at interior nodes
  int dim = 1;
  int interior = 0;  // interior nodes per axis
  double cell_volume = 1.0;
};

/// -1/2 Delta_h - lambda Gamma_eps with Dirichlet boundary. With eps = 0 and white
/// noise each coincidence node carries 1 / (scale * h).
Hamiltonian assemble_hamiltonian(const ReducedProblem& p, const GridSpec& grid);

/// lambda int Gamma_eps g^2 - 1/2 int |grad g|^2 with forward differences and zero
/// boundary values; g lives on the interior nodes with h^d sum g^2 = 1.
double energy_functional_real(std::span<const double> g, const ReducedProblem& p, const GridSpec& grid);

/// Centred frequency lattice, zeta_i = (i - (count - 1)/2) * step on every axis.
struct FrequencyGrid {
  int dim = 1;
  int count = 101;
  double step = 0.1;
  double coordinate(int i) const { return (i - 0.5 * (count - 1)) * step; }
};

/// Unitary transform (2 pi)^{-d/2} int e^{-i zeta.y} g(y) dy of a lattice function,
/// rescaled to unit discrete L^2 norm on the frequency lattice.
std::vector<std::complex<double>> to_frequency(std::span<const double> g, const GridSpec& grid,
                                               int dim, const FrequencyGrid& freq);

/// sum_pairs (2 pi)^{-l} int e^{-eps|xi|^2} (h*h)(A^T xi) mu(dxi)
///   - 1/2 int sum_k coef_k (offset_k . zeta)^2 |h(zeta)|^2 dzeta,
/// with h*h a direct discrete convolution, interpolated by cubic Lagrange
/// polynomials off the lattice.
double energy_functional_fourier(std::span<const std::complex<double>> h, const FrequencyGrid& freq,
                                 const ReducedProblem& p);

/// Half-widths and spacings, each refined geometrically; every combination
/// must give an integer m = 2L/h + 1.
struct GridSchedule {
  std::vector<double> half_widths;
  std::vector<double> spacings;
};

struct RawValue {
  double half_width = 0.0;
  double spacing = 0.0;
  double eps = 0.0;
  double eigenvalue = 0.0;
};

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 500;
  std::uint64_t seed = 1;
};

struct EnEstimate {
  double value = 0.0;
  std::vector<RawValue> raw_values;
  double error_bar = 0.0;
  double maximizer_norm_check = 0.0;
  /// "extrapolated" or "unextrapolated" (value is then the finest raw value).
  std::string verdict = "extrapolated";
  /// Mass of the ground state within one outer layer of the largest box.
  double boundary_mass = 0.0;
  std::vector<std::string> warnings;
};

/// -lambda_min over the schedule, extrapolated h -> 0 (Richardson in h^2, h^4),
/// then L -> inf and eps -> 0 (both by three-term geometric acceleration).
/// eps_schedule: {0} for white noise, one positive value for a fixed
/// regularization, or at least three decreasing positive values.
EnEstimate solve_En(const VariationalProblem& p, const GridSchedule& schedule,
                    std::span<const double> eps_schedule, const SolverOptions& opts = {});

struct EHOptions {
  double tol = 1e-10;
  int max_iter = 200000;
};

struct EHResult {
  double value = 0.0;
  std::vector<double> profile;  // maximizer on interior nodes, h sum g^2 = 1
  int iterations = 0;
  double residual = 0.0;
};

/// sup_g { lambda int int gamma_eps(x - y) g^2(x) g^2(y) - int |g'|^2 } on a 1-D
/// grid by normalized backward-Euler gradient flow. The box value is clipped at
/// 0, the supremum over the line.
EHResult solve_EH(const SpectralMeasure& m, double lambda, double eps, const GridSpec& grid,
                  const EHOptions& opts = {});

}  // namespace pam
