#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pam {

/// Compressed-row sparse matrix.
struct SparseMatrix {
  int size = 0;
  std::vector<int> row_ptr;  // size + 1 entries
  std::vector<int> cols;
  std::vector<double> values;

  void multiply(std::span<const double> x, std::span<double> y) const;
  double entry(int row, int col) const;
  /// Exact structural and numerical symmetry.
  bool is_symmetric() const;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;  // ||H v - value v||_2 / ||v||_2
  int iterations = 0;
};

/// Smallest eigenvalue of a symmetric sparse matrix and its eigenvector.
/// The shift-inverted operator is explored with a short Lanczos run from a
/// seeded start vector, then inverse iteration with a shift just below the
/// estimate polishes the pair until the relative residual is <= tol.
/// The eigenvector satisfies sum v_i^2 * cell_volume = 1 and its first
/// non-negligible component is positive.
EigenPair ground_energy(const SparseMatrix& op, double tol = 1e-10, int max_iter = 200,
                        std::uint64_t seed = 1, double cell_volume = 1.0);

}  // namespace pam
