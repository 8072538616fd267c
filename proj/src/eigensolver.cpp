#include "pam/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <string>

#include "pam/error.hpp"
#include "pam/rng.hpp"

namespace pam {

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < size; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[cols[k]];
    y[i] = s;
  }
}

double SparseMatrix::entry(int row, int col) const {
  for (int k = row_ptr[row]; k < row_ptr[row + 1]; ++k)
    if (cols[k] == col) return values[k];
  return 0.0;
}

bool SparseMatrix::is_symmetric() const {
  for (int i = 0; i < size; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (entry(cols[k], i) != values[k]) return false;
  return true;
}

namespace {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

SpMat to_eigen(const SparseMatrix& op) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(op.values.size());
  for (int i = 0; i < op.size; ++i)
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) trip.emplace_back(i, op.cols[k], op.values[k]);
  SpMat a(op.size, op.size);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

void finalize(EigenPair& out, Vec v, double cell_volume) {
  int lead = 0;
  const double vmax = v.cwiseAbs().maxCoeff();
  while (lead < v.size() && std::abs(v[lead]) <= 1e-8 * vmax) ++lead;
  if (lead < v.size() && v[lead] < 0.0) v = -v;
  v /= std::sqrt(v.squaredNorm() * cell_volume);
  out.vector.assign(v.data(), v.data() + v.size());
}

double residual_of(const SpMat& a, const Vec& v, double lambda) {
  return (a * v - lambda * v).norm() / v.norm();
}

}  // namespace

EigenPair ground_energy(const SparseMatrix& op, double tol, int max_iter, std::uint64_t seed,
                        double cell_volume) {
  if (op.size <= 0) throw Error(ErrorCode::parameter_out_of_range, "empty operator");
  const SpMat a = to_eigen(op);
  EigenPair out;

  if (op.size <= 300) {
    const Eigen::MatrixXd dense(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    out.value = es.eigenvalues()[0];
    const Vec v = es.eigenvectors().col(0);
    out.residual = residual_of(a, v, out.value);
    out.iterations = 1;
    finalize(out, v, cell_volume);
    return out;
  }

  // Gershgorin bound: a shift strictly below the spectrum keeps A - sigma positive definite.
  double lower = INFINITY;
  for (int i = 0; i < op.size; ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      if (op.cols[k] == i) diag += op.values[k];
      else off += std::abs(op.values[k]);
    }
    lower = std::min(lower, diag - off);
  }
  double sigma = lower - std::max(1.0, std::abs(lower)) * 1e-3;

  Xoshiro256 rng(seed);
  Vec v(op.size);
  for (int i = 0; i < op.size; ++i) v[i] = rng.uniform() + 0.5;
  v.normalize();

  Eigen::SimplicialLDLT<SpMat> solver;
  SpMat id(op.size, op.size);
  id.setIdentity();
  solver.compute(a - sigma * id);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::no_convergence, "factorization of the shifted operator failed");

  // Lanczos with full reorthogonalization on (A - sigma)^{-1}.
  const int steps = std::min(op.size, 30);
  std::vector<Vec> basis{v};
  std::vector<double> alpha, beta;
  int iterations = 0;
  for (int j = 0; j < steps; ++j) {
    Vec w = solver.solve(basis[j]);
    ++iterations;
    alpha.push_back(basis[j].dot(w));
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();
    if (j + 1 == steps || b < 1e-14 * std::abs(alpha.back())) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  const int k = static_cast<int>(alpha.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  Vec diag = Eigen::Map<Vec>(alpha.data(), k);
  Vec sub = Eigen::Map<Vec>(beta.data(), k - 1);
  tri.computeFromTridiagonal(diag, sub);
  const Vec y = tri.eigenvectors().col(k - 1);
  v.setZero();
  for (int j = 0; j < k; ++j) v += y[j] * basis[j];
  v.normalize();
  basis.clear();

  double lambda = v.dot(a * v);
  double res = residual_of(a, v, lambda);
  double best_res = res;
  Vec best = v;
  double best_lambda = lambda;

  if (res > tol) {
    // A Ritz value is an upper bound for the ground energy and some eigenvalue lies
    // within the residual of it, so lambda - 2 res stays below the ground energy.
    const double scale = std::max(1.0, std::abs(lambda));
    sigma = std::max(sigma, lambda - std::max(2.0 * res, 1e-10 * scale));
    solver.compute(a - sigma * id);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorCode::no_convergence, "factorization of the shifted operator failed");
    while (iterations < max_iter) {
      v = solver.solve(v);
      v.normalize();
      ++iterations;
      lambda = v.dot(a * v);
      res = residual_of(a, v, lambda);
      if (res < best_res) {
        best_res = res;
        best = v;
        best_lambda = lambda;
      }
      if (res <= tol) break;
    }
  }
  out.value = best_lambda;
  out.residual = best_res;
  out.iterations = iterations;
  if (best_res > tol)
    throw Error(ErrorCode::no_convergence,
                "ground state residual " + std::to_string(best_res) + " above tolerance");
  finalize(out, best, cell_volume);
  return out;
}

}  // namespace pam
