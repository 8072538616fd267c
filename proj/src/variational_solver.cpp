#include "pam/variational_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "pam/error.hpp"
#include "pam/extrapolation.hpp"
#include "pam/quadrature.hpp"

namespace pam {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

bool is_white(const SpectralMeasure& m) { return m.kind() == MeasureKind::white_noise; }

void validate(const VariationalProblem& p) {
  require(p.n >= 2, ErrorCode::parameter_out_of_range, "need at least two particles");
  require(p.ell >= 1, ErrorCode::parameter_out_of_range, "dimension must be positive");
  require(p.measure.dim() == p.ell, ErrorCode::dimension_mismatch, "measure dimension differs from l");
  require(p.noise_scale >= 0.0 && std::isfinite(p.noise_scale), ErrorCode::parameter_out_of_range,
          "noise scale must be nonnegative");
  require(p.eps >= 0.0, ErrorCode::invalid_regularization, "eps must be nonnegative");
  require(p.eps > 0.0 || is_white(p.measure), ErrorCode::invalid_regularization,
          "eps = 0 is only available for white noise");
}

/// Pair kernel gamma_eps at the given radii.
std::vector<double> kernel_values(const SpectralMeasure& m, double eps, std::span<const double> radii) {
  if (is_white(m)) {
    std::vector<double> out(radii.size());
    const double c = 1.0 / std::sqrt(4.0 * kPi * eps);
    for (std::size_t i = 0; i < radii.size(); ++i) out[i] = c * std::exp(-radii[i] * radii[i] / (4.0 * eps));
    return out;
  }
  return regularized_covariance_radii(m, eps, radii);
}

struct Lattice {
  int dim;
  int m;         // points per axis, boundary included
  int interior;  // m - 2
  double h;
  std::size_t size;

  Lattice(int d, const GridSpec& grid)
      : dim(d), m(grid.points_per_axis), interior(grid.points_per_axis - 2), h(grid.spacing()) {
    size = 1;
    for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(interior);
  }
  /// Signed offsets k_a of an interior node from the centre, in units of h
  /// (half-integers when m is even).
  void offsets(std::size_t flat, std::vector<double>& k) const {
    for (int a = dim - 1; a >= 0; --a) {
      const int i = static_cast<int>(flat % interior) + 1;
      flat /= interior;
      k[a] = i - 0.5 * (m - 1);
    }
  }
  void indices(std::size_t flat, std::vector<int>& idx) const {
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % interior);
      flat /= interior;
    }
  }
  /// Flat index of idx + off, or -1 outside the interior.
  long neighbour(const std::vector<int>& idx, const std::vector<int>& off) const {
    long flat = 0;
    for (int a = 0; a < dim; ++a) {
      const int j = idx[a] + off[a];
      if (j < 0 || j >= interior) return -1;
      flat = flat * interior + j;
    }
    return flat;
  }
};

void check_grid(const ReducedProblem& p, const GridSpec& grid) {
  require(grid.points_per_axis >= 16, ErrorCode::grid_too_coarse, "need at least 16 points per axis");
  require(grid.half_width > 0.0, ErrorCode::parameter_out_of_range, "half width must be positive");
  if (p.eps > 0.0) {
    require(grid.spacing() <= std::sqrt(p.eps) * (1.0 + 1e-12), ErrorCode::grid_too_coarse,
            "spacing must not exceed sqrt(eps)");
  } else {
    require(grid.points_per_axis % 2 == 1, ErrorCode::grid_too_coarse,
            "the on-site delta needs the origin on the lattice (odd m)");
  }
}

std::vector<double> lattice_potential(const ReducedProblem& p, const Lattice& lat) {
  std::vector<double> v(lat.size, 0.0);
  if (p.noise_scale == 0.0) return v;
  std::vector<double> k(lat.dim);
  for (const PairMap& pair : p.pairs) {
    if (p.eps == 0.0) {
      const double weight = p.noise_scale / (pair.scale * lat.h);
      for (std::size_t f = 0; f < lat.size; ++f) {
        lat.offsets(f, k);
        double s = 0.0;
        for (int a = 0; a < lat.dim; ++a) s += pair.stencil[a] * k[a];
        if (s == 0.0) v[f] += weight;
      }
      continue;
    }
    std::vector<double> radii(lat.size);
    for (std::size_t f = 0; f < lat.size; ++f) {
      lat.offsets(f, k);
      double r2 = 0.0;
      for (int row = 0; row < p.ell; ++row) {
        double s = 0.0;
        for (int a = 0; a < lat.dim; ++a) s += pair.matrix[row * lat.dim + a] * k[a];
        r2 += s * s;
      }
      radii[f] = std::sqrt(r2) * lat.h;
    }
    const std::vector<double> g = kernel_values(p.measure, p.eps, radii);
    for (std::size_t f = 0; f < lat.size; ++f) v[f] += p.noise_scale * g[f];
  }
  return v;
}

double lattice_norm2(std::span<const double> g, double cell) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return s * cell;
}

}  // namespace

ReducedProblem reduce_center_of_mass(const VariationalProblem& p) {
  validate(p);
  require((p.n - 1) * p.ell <= 2, ErrorCode::instance_too_large,
          "reduced dimension (n - 1) l must not exceed 2");
  ReducedProblem r;
  r.n = p.n;
  r.ell = p.ell;
  r.dim = (p.n - 1) * p.ell;
  r.measure = p.measure;
  r.noise_scale = p.noise_scale;
  r.eps = p.eps;
  const double s2 = std::sqrt(2.0);
  if (p.n == 2) {
    for (int a = 0; a < r.dim; ++a) {
      KineticDirection kd;
      kd.offset.assign(r.dim, 0);
      kd.offset[a] = 1;
      r.kinetic.push_back(kd);
    }
    PairMap pm;
    pm.matrix.assign(r.ell * r.dim, 0.0);
    for (int a = 0; a < r.dim; ++a) pm.matrix[a * r.dim + a] = s2;
    if (r.ell == 1) {
      pm.stencil = {1};
      pm.scale = s2;
    }
    r.pairs.push_back(pm);
    return r;
  }
  // n = 3, l = 1: y_1 = x^1 - x^3, y_2 = x^2 - x^3.
  r.kinetic = {{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{1, 1}, 1.0}};
  const int stencils[3][2] = {{1, -1}, {1, 0}, {0, 1}};
  for (const auto& st : stencils) {
    PairMap pm;
    pm.matrix = {static_cast<double>(st[0]), static_cast<double>(st[1])};
    pm.stencil = {st[0], st[1]};
    pm.scale = 1.0;
    r.pairs.push_back(pm);
  }
  return r;
}

Hamiltonian assemble_hamiltonian(const ReducedProblem& p, const GridSpec& grid) {
  check_grid(p, grid);
  const Lattice lat(p.dim, grid);
  Hamiltonian H;
  H.dim = p.dim;
  H.interior = lat.interior;
  H.cell_volume = std::pow(lat.h, p.dim);
  H.potential = lattice_potential(p, lat);
  require(lat.size < static_cast<std::size_t>(1) << 30, ErrorCode::instance_too_large, "grid too large");

  const double inv_h2 = 1.0 / (lat.h * lat.h);
  double diag_kinetic = 0.0;
  for (const KineticDirection& kd : p.kinetic) diag_kinetic += kd.coef * inv_h2;

  SparseMatrix& A = H.matrix;
  A.size = static_cast<int>(lat.size);
  A.row_ptr.assign(1, 0);
  std::vector<int> idx(p.dim);
  std::vector<int> minus(p.dim);
  std::vector<std::pair<int, double>> row;
  for (std::size_t f = 0; f < lat.size; ++f) {
    lat.indices(f, idx);
    row.clear();
    row.emplace_back(static_cast<int>(f), diag_kinetic - H.potential[f]);
    for (const KineticDirection& kd : p.kinetic) {
      for (int a = 0; a < p.dim; ++a) minus[a] = -kd.offset[a];
      const double off = -0.5 * kd.coef * inv_h2;
      const long up = lat.neighbour(idx, kd.offset);
      const long down = lat.neighbour(idx, minus);
      if (up >= 0) row.emplace_back(static_cast<int>(up), off);
      if (down >= 0) row.emplace_back(static_cast<int>(down), off);
    }
    std::sort(row.begin(), row.end());
    for (auto& [c, v] : row) {
      A.cols.push_back(c);
      A.values.push_back(v);
    }
    A.row_ptr.push_back(static_cast<int>(A.cols.size()));
  }
  return H;
}

double energy_functional_real(std::span<const double> g, const ReducedProblem& p, const GridSpec& grid) {
  check_grid(p, grid);
  const Lattice lat(p.dim, grid);
  require(g.size() == lat.size, ErrorCode::dimension_mismatch, "lattice function has wrong size");
  const double cell = std::pow(lat.h, p.dim);
  require(std::abs(lattice_norm2(g, cell) - 1.0) <= 1e-10, ErrorCode::unnormalized_input,
          "lattice function must have unit L2 norm");
  const std::vector<double> v = lattice_potential(p, lat);
  double pot = 0.0;
  for (std::size_t f = 0; f < lat.size; ++f) pot += v[f] * g[f] * g[f];
  pot *= cell;

  std::vector<int> idx(p.dim);
  std::vector<int> minus(p.dim);
  double kin = 0.0;
  for (const KineticDirection& kd : p.kinetic) {
    for (int a = 0; a < p.dim; ++a) minus[a] = -kd.offset[a];
    double edges = 0.0;
    for (std::size_t f = 0; f < lat.size; ++f) {
      lat.indices(f, idx);
      const long up = lat.neighbour(idx, kd.offset);
      const double d = (up >= 0 ? g[up] : 0.0) - g[f];
      edges += d * d;
      if (lat.neighbour(idx, minus) < 0) edges += g[f] * g[f];
    }
    kin += kd.coef * edges;
  }
  kin *= 0.5 * cell / (lat.h * lat.h);
  return pot - kin;
}

std::vector<std::complex<double>> to_frequency(std::span<const double> g, const GridSpec& grid, int dim,
                                               const FrequencyGrid& freq) {
  require(dim == 1 || dim == 2, ErrorCode::instance_too_large, "transform supports d <= 2");
  require(freq.dim == dim, ErrorCode::dimension_mismatch, "frequency grid dimension differs");
  const Lattice lat(dim, grid);
  require(g.size() == lat.size, ErrorCode::dimension_mismatch, "lattice function has wrong size");
  const int n = lat.interior;
  const int c = freq.count;
  // phase[j * n + i] = e^{-i zeta_j y_i}
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(c) * n);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < n; ++i) {
      const double arg = -freq.coordinate(j) * grid.coordinate(i + 1);
      phase[static_cast<std::size_t>(j) * n + i] = {std::cos(arg), std::sin(arg)};
    }
  const double pref = lat.h / std::sqrt(2.0 * kPi);
  std::vector<std::complex<double>> out;
  if (dim == 1) {
    out.assign(c, 0.0);
    for (int j = 0; j < c; ++j) {
      std::complex<double> s = 0.0;
      for (int i = 0; i < n; ++i) s += phase[static_cast<std::size_t>(j) * n + i] * g[i];
      out[j] = pref * s;
    }
  } else {
    // First along the fast axis, then along the slow one.
    std::vector<std::complex<double>> half(static_cast<std::size_t>(n) * c);
    for (int i0 = 0; i0 < n; ++i0)
      for (int j1 = 0; j1 < c; ++j1) {
        std::complex<double> s = 0.0;
        for (int i1 = 0; i1 < n; ++i1) s += phase[static_cast<std::size_t>(j1) * n + i1] * g[i0 * n + i1];
        half[static_cast<std::size_t>(i0) * c + j1] = pref * s;
      }
    out.assign(static_cast<std::size_t>(c) * c, 0.0);
    for (int j0 = 0; j0 < c; ++j0)
      for (int j1 = 0; j1 < c; ++j1) {
        std::complex<double> s = 0.0;
        for (int i0 = 0; i0 < n; ++i0) s += phase[static_cast<std::size_t>(j0) * n + i0] * half[static_cast<std::size_t>(i0) * c + j1];
        out[static_cast<std::size_t>(j0) * c + j1] = pref * s;
      }
  }
  double norm = 0.0;
  for (auto& z : out) norm += std::norm(z);
  norm = std::sqrt(norm * std::pow(freq.step, dim));
  for (auto& z : out) z /= norm;
  return out;
}

double energy_functional_fourier(std::span<const std::complex<double>> h, const FrequencyGrid& freq,
                                 const ReducedProblem& p) {
  const int d = p.dim;
  require(d == 1 || d == 2, ErrorCode::instance_too_large, "Fourier functional supports d <= 2");
  require(freq.dim == d, ErrorCode::dimension_mismatch, "frequency grid dimension differs");
  const int c = freq.count;
  const std::size_t total = d == 1 ? c : static_cast<std::size_t>(c) * c;
  require(h.size() == total, ErrorCode::dimension_mismatch, "frequency function has wrong size");
  const double cell = std::pow(freq.step, d);
  double norm = 0.0;
  double hmax = 0.0;
  for (auto& z : h) {
    norm += std::norm(z);
    hmax = std::max(hmax, std::abs(z));
  }
  require(std::abs(norm * cell - 1.0) <= 1e-8, ErrorCode::unnormalized_input,
          "frequency function must have unit L2 norm");
  auto mirror = [&](std::size_t f) {
    if (d == 1) return total - 1 - f;
    const std::size_t i0 = f / c;
    const std::size_t i1 = f % c;
    return (c - 1 - i0) * c + (c - 1 - i1);
  };
  for (std::size_t f = 0; f < total; ++f)
    require(std::abs(h[mirror(f)] - std::conj(h[f])) <= 1e-10 * hmax, ErrorCode::symmetry_violation,
            "frequency function must satisfy h(-zeta) = conj h(zeta)");

  // Kinetic part.
  double kin = 0.0;
  for (std::size_t f = 0; f < total; ++f) {
    double z[2] = {0.0, 0.0};
    if (d == 1) {
      z[0] = freq.coordinate(static_cast<int>(f));
    } else {
      z[0] = freq.coordinate(static_cast<int>(f / c));
      z[1] = freq.coordinate(static_cast<int>(f % c));
    }
    double q = 0.0;
    for (const KineticDirection& kd : p.kinetic) {
      double dot = 0.0;
      for (int a = 0; a < d; ++a) dot += kd.offset[a] * z[a];
      q += kd.coef * dot * dot;
    }
    kin += q * std::norm(h[f]);
  }
  kin *= 0.5 * cell;
  if (p.noise_scale == 0.0) return -kin;

  // Self-convolution on the doubled lattice omega_k = (k - (c - 1)) step.
  const int cc = 2 * c - 1;
  std::vector<double> conv(d == 1 ? cc : static_cast<std::size_t>(cc) * cc, 0.0);
  if (d == 1) {
    for (int k = 0; k < cc; ++k) {
      std::complex<double> s = 0.0;
      for (int j = std::max(0, k - c + 1); j <= std::min(c - 1, k); ++j) s += h[j] * h[k - j];
      conv[k] = s.real() * cell;
    }
  } else {
    for (int k0 = 0; k0 < cc; ++k0)
      for (int k1 = 0; k1 < cc; ++k1) {
        std::complex<double> s = 0.0;
        for (int j0 = std::max(0, k0 - c + 1); j0 <= std::min(c - 1, k0); ++j0)
          for (int j1 = std::max(0, k1 - c + 1); j1 <= std::min(c - 1, k1); ++j1)
            s += h[static_cast<std::size_t>(j0) * c + j1] * h[static_cast<std::size_t>(k0 - j0) * c + (k1 - j1)];
        conv[static_cast<std::size_t>(k0) * cc + k1] = s.real() * cell;
      }
  }
  // Four-point Lagrange interpolation per axis; values beyond the lattice are 0.
  auto conv_at = [&](const double* omega) {
    int base[2] = {0, 0};
    double w[2][4] = {};
    for (int a = 0; a < d; ++a) {
      const double s = omega[a] / freq.step + (c - 1);
      if (s < 0.0 || s > cc - 1) return 0.0;
      base[a] = std::min(static_cast<int>(s), cc - 2);
      const double u = s - base[a];
      w[a][0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
      w[a][1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
      w[a][2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
      w[a][3] = (u + 1.0) * u * (u - 1.0) / 6.0;
    }
    auto value = [&](int i0, int i1) {
      if (i0 < 0 || i0 >= cc || i1 < 0 || i1 >= cc) return 0.0;
      return d == 1 ? conv[i0] : conv[static_cast<std::size_t>(i0) * cc + i1];
    };
    double sum = 0.0;
    if (d == 1) {
      for (int q = 0; q < 4; ++q) sum += w[0][q] * value(base[0] - 1 + q, 0);
      return sum;
    }
    for (int q0 = 0; q0 < 4; ++q0)
      for (int q1 = 0; q1 < 4; ++q1)
        sum += w[0][q0] * w[1][q1] * value(base[0] - 1 + q0, base[1] - 1 + q1);
    return sum;
  };

  const SpectralMeasure& m = p.measure;
  const TailSpec& tails = m.tails();
  const GaussRule& rule = gauss_legendre(20);
  const double omega_max = (c - 1) * freq.step;
  double pot = 0.0;
  for (const PairMap& pair : p.pairs) {
    // Radius in xi beyond which A^T xi leaves the support of h*h.
    double amax = 0.0;
    for (double a : pair.matrix) amax = std::max(amax, std::abs(a));
    const double r_max = omega_max / amax;
    std::vector<double> breaks;
    const double w = freq.step / amax;
    for (double r = 0.0; r < r_max; r += w) breaks.push_back(r);
    breaks.push_back(r_max);
    for (double b : {tails.r_min, tails.r_max})
      if (b > 0.0 && b < r_max) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const int angles = p.ell == 1 ? 2 : 256;
    auto shell = [&](double r) {
      // Sum over directions theta of (h*h)(r A^T theta), times the angular measure.
      double s = 0.0;
      for (int t = 0; t < angles; ++t) {
        double theta[2];
        if (p.ell == 1) {
          theta[0] = t == 0 ? 1.0 : -1.0;
        } else {
          const double phi = 2.0 * kPi * t / angles;
          theta[0] = std::cos(phi);
          theta[1] = std::sin(phi);
        }
        double omega[2] = {0.0, 0.0};
        for (int a = 0; a < d; ++a)
          for (int row = 0; row < p.ell; ++row) omega[a] += pair.matrix[row * d + a] * r * theta[row];
        s += conv_at(omega);
      }
      return p.ell == 1 ? s : s * 2.0 * kPi / angles;
    };
    auto radial = [&](double r) {
      return shell(r) * std::exp(-p.eps * r * r) * m.radial_density(r) * std::pow(r, p.ell - 1);
    };
    const double e0 = tails.r_min == 0.0 ? tails.exponent_at_zero + p.ell - 1 : 0.0;
    double integral = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const double lo = breaks[b];
      const double hi = breaks[b + 1];
      if (lo == 0.0 && e0 < 0.0) {
        // r = hi u^kappa removes the r^{e0} singularity at the origin.
        const double kappa = 1.0 / (1.0 + e0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double u = 0.5 * (rule.nodes[i] + 1.0);
          const double r = hi * std::pow(u, kappa);
          const double jac = hi * kappa * std::pow(u, kappa - 1.0);
          integral += 0.5 * rule.weights[i] * jac * radial(r);
        }
        continue;
      }
      const double half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        integral += rule.weights[i] * half * radial(lo + half * (rule.nodes[i] + 1.0));
    }
    pot += integral * std::pow(2.0 * kPi, -p.ell);
  }
  return p.noise_scale * pot - kin;
}

EnEstimate solve_En(const VariationalProblem& problem, const GridSchedule& schedule,
                    std::span<const double> eps_schedule, const SolverOptions& opts) {
  require(!eps_schedule.empty(), ErrorCode::insufficient_points, "eps schedule is empty");
  const auto& Ls = schedule.half_widths;
  const auto& hs = schedule.spacings;
  require(Ls.size() >= 3 && hs.size() >= 3, ErrorCode::insufficient_points,
          "grid schedule needs at least three half widths and three spacings");
  for (std::size_t i = 1; i < Ls.size(); ++i)
    require(Ls[i] > Ls[i - 1], ErrorCode::parameter_out_of_range, "half widths must increase");
  for (std::size_t i = 1; i < hs.size(); ++i)
    require(hs[i] < hs[i - 1] && hs[i] > 0.0, ErrorCode::parameter_out_of_range, "spacings must decrease");
  const bool white_delta = eps_schedule.size() == 1 && eps_schedule[0] == 0.0;
  if (!white_delta) {
    require(eps_schedule.size() != 2, ErrorCode::insufficient_points,
            "eps schedule needs one value or at least three");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
      require(eps_schedule[i] > 0.0, ErrorCode::invalid_regularization, "eps values must be positive");
      if (i > 0)
        require(eps_schedule[i] < eps_schedule[i - 1], ErrorCode::parameter_out_of_range,
                "eps schedule must decrease");
    }
  }

  VariationalProblem p = problem;
  p.eps = eps_schedule[0];
  validate(p);
  EnEstimate est;
  // values[e][l][k]
  std::vector<std::vector<std::vector<double>>> values(
      eps_schedule.size(), std::vector<std::vector<double>>(Ls.size(), std::vector<double>(hs.size())));
  std::vector<double> finest;
  GridSpec finest_grid;
  for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
    p.eps = eps_schedule[e];
    const ReducedProblem r = reduce_center_of_mass(p);
    for (std::size_t l = 0; l < Ls.size(); ++l) {
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double cells = 2.0 * Ls[l] / hs[k];
        require(std::abs(cells - std::round(cells)) <= 1e-9 * cells, ErrorCode::parameter_out_of_range,
                "2L/h must be an integer");
        GridSpec grid{Ls[l], static_cast<int>(std::round(cells)) + 1};
        const Hamiltonian H = assemble_hamiltonian(r, grid);
        const EigenPair ep = ground_energy(H.matrix, opts.tol, opts.max_iter, opts.seed, H.cell_volume);
        values[e][l][k] = -ep.value;
        est.raw_values.push_back({Ls[l], hs[k], p.eps, ep.value});
        if (e + 1 == eps_schedule.size() && l + 1 == Ls.size() && k + 1 == hs.size()) {
          finest = ep.vector;
          finest_grid = grid;
          est.maximizer_norm_check = std::sqrt(lattice_norm2(finest, H.cell_volume));
          // Mass in the outer tenth of the box.
          const Lattice lat(r.dim, grid);
          std::vector<double> kk(r.dim);
          double outer = 0.0;
          for (std::size_t f = 0; f < lat.size; ++f) {
            lat.offsets(f, kk);
            double far = 0.0;
            for (double x : kk) far = std::max(far, std::abs(x) * lat.h);
            if (far >= 0.9 * grid.half_width) outer += finest[f] * finest[f];
          }
          est.boundary_mass = outer * H.cell_volume;
        }
      }
    }
  }
  const double finest_value = values.back().back().back();
  if (est.boundary_mass > 1e-8) est.warnings.push_back("ground state mass near the boundary exceeds 1e-8");

  bool monotone = true;
  for (std::size_t e = 1; e < eps_schedule.size(); ++e)
    for (std::size_t l = 0; l < Ls.size(); ++l)
      for (std::size_t k = 0; k < hs.size(); ++k)
        if (values[e][l][k] < values[e - 1][l][k] - 1e-10) monotone = false;

  const double orders[] = {2.0, 4.0};
  auto floor_of = [](double x) { return 1e-9 * std::max(1.0, std::abs(x)); };
  std::vector<double> per_eps;
  double last_error = 0.0;
  bool ok = monotone;
  for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
    std::vector<double> per_L;
    for (std::size_t l = 0; l < Ls.size(); ++l) {
      const Extrapolated rh = richardson(hs, values[e][l], orders);
      ok = ok && rh.ok;
      per_L.push_back(rh.value);
    }
    const Extrapolated ex = aitken(per_L, floor_of(per_L.back()));
    ok = ok && ex.ok;
    per_eps.push_back(ex.value);
    last_error = ex.error;
  }
  double value = per_eps.back();
  if (eps_schedule.size() >= 3) {
    const Extrapolated ex = aitken(per_eps, floor_of(per_eps.back()));
    ok = ok && ex.ok;
    value = ex.value;
    last_error = ex.error;
  }
  if (!monotone) est.warnings.push_back("raw energies are not monotone in eps");
  if (!ok) {
    est.verdict = "unextrapolated";
    est.value = finest_value;
    est.error_bar = std::abs(finest_value - value);
    return est;
  }
  est.value = value;
  est.error_bar = last_error;
  if (value < -1e-9) est.warnings.push_back("extrapolated value is negative");
  return est;
}

EHResult solve_EH(const SpectralMeasure& m, double lambda, double eps, const GridSpec& grid,
                  const EHOptions& opts) {
  require(m.dim() == 1, ErrorCode::dimension_mismatch, "the single-function problem is one-dimensional");
  require(lambda >= 0.0, ErrorCode::parameter_out_of_range, "lambda must be nonnegative");
  require(eps > 0.0 || (eps == 0.0 && is_white(m)), ErrorCode::invalid_regularization,
          "eps must be positive unless the noise is white");
  require(grid.points_per_axis >= 16, ErrorCode::grid_too_coarse, "need at least 16 points");
  const int n = grid.points_per_axis - 2;
  const double h = grid.spacing();
  if (eps > 0.0)
    require(h <= std::sqrt(eps) * (1.0 + 1e-12), ErrorCode::grid_too_coarse, "spacing must not exceed sqrt(eps)");

  std::vector<double> kernel;  // gamma_eps(j h) * h, j = 0..n-1
  if (eps > 0.0) {
    std::vector<double> radii(n);
    for (int j = 0; j < n; ++j) radii[j] = j * h;
    kernel = kernel_values(m, eps, radii);
    for (double& k : kernel) k *= h;
  }
  auto smeared = [&](const std::vector<double>& g2, std::vector<double>& out) {
    if (eps == 0.0) {
      out = g2;
      return;
    }
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += kernel[std::abs(i - j)] * g2[j];
      out[i] = s;
    }
  };
  auto normalize = [&](std::vector<double>& g) {
    double s = 0.0;
    for (double x : g) s += x * x;
    s = std::sqrt(s * h);
    for (double& x : g) x /= s;
  };

  std::vector<double> g(n), g2(n), conv(n), W(n), next(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.coordinate(i + 1);
    g[i] = std::exp(-0.5 * x * x * std::max(lambda * lambda / 4.0, 0.01));
  }
  normalize(g);
  const double inv_h2 = 1.0 / (h * h);
  EHResult res;
  std::vector<double> cp(n), dp(n);
  for (int it = 0; it < opts.max_iter; ++it) {
    for (int i = 0; i < n; ++i) g2[i] = g[i] * g[i];
    smeared(g2, conv);
    double wmax = 0.0;
    for (int i = 0; i < n; ++i) {
      W[i] = 2.0 * lambda * conv[i];
      wmax = std::max(wmax, W[i]);
    }
    // Residual of (-Delta - W) g = theta g.
    double theta = 0.0;
    std::vector<double>& Ag = next;
    for (int i = 0; i < n; ++i) {
      const double lap = ((i + 1 < n ? g[i + 1] : 0.0) - 2.0 * g[i] + (i > 0 ? g[i - 1] : 0.0)) * inv_h2;
      Ag[i] = -lap - W[i] * g[i];
      theta += Ag[i] * g[i];
    }
    theta *= h;
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += (Ag[i] - theta * g[i]) * (Ag[i] - theta * g[i]);
    res.residual = std::sqrt(r2 * h);
    res.iterations = it;
    if (res.residual <= opts.tol * std::max(1.0, std::abs(theta))) break;

    // (I - tau (Delta + W)) g_new = g, tridiagonal.
    const double tau = wmax > 0.0 ? 0.5 / wmax : 1e3;
    const double off = -tau * inv_h2;
    for (int i = 0; i < n; ++i) {
      const double diag = 1.0 + 2.0 * tau * inv_h2 - tau * W[i];
      const double denom = diag - (i > 0 ? off * cp[i - 1] : 0.0);
      cp[i] = off / denom;
      dp[i] = (g[i] - (i > 0 ? off * dp[i - 1] : 0.0)) / denom;
    }
    next[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) next[i] = dp[i] - cp[i] * next[i + 1];
    normalize(next);
    g.swap(next);
  }
  if (res.residual > opts.tol * 1e3)
    throw Error(ErrorCode::no_convergence, "gradient flow for the single-function problem stalled");

  for (int i = 0; i < n; ++i) g2[i] = g[i] * g[i];
  smeared(g2, conv);
  double pot = 0.0;
  double kin = 0.0;
  for (int i = 0; i < n; ++i) {
    pot += conv[i] * g2[i];
    const double d = (i + 1 < n ? g[i + 1] : 0.0) - g[i];
    kin += d * d;
  }
  kin += g[0] * g[0];
  const double value = lambda * pot * h - kin / h;
  res.value = std::max(0.0, value);
  res.profile = g;
  return res;
}

}  // namespace pam
