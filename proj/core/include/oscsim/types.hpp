#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace oscsim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Raised when an algorithm drifts past its numeric tolerances (eigensolver
/// non-convergence, Hermiticity repair beyond budget). The CLI maps this to
/// exit code 2; precondition violations throw std::invalid_argument instead.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid x_j = j * spacing over j = -N/2 .. N/2-1 with
/// spacing = sqrt(2*pi/N), so that spacing^2 * N = 2*pi exactly.
/// low_energy_fraction bounds the index range n <= fraction*N on which the
/// discrete model is trusted to track the continuum.
struct GridSpec {
  int n = 0;
  double spacing = 0.0;
  double low_energy_fraction = 0.5;

  /// Validates n (even, >= 4) and derives the spacing.
  static GridSpec make(int n, double low_energy_fraction = 0.5);

  int j_min() const { return -n / 2; }
  int j_max() const { return n / 2 - 1; }
  /// Physical coordinate of storage slot i (i = 0 maps to j = -N/2).
  double x_at(int storage_index) const {
    return (storage_index - n / 2) * spacing;
  }
  /// Comb period T = sqrt(2*pi*N) = N * spacing.
  double period() const { return n * spacing; }
  /// Largest mode index the grid is trusted for (inclusive).
  int max_trusted_index() const {
    return static_cast<int>(low_energy_fraction * n);
  }
};

/// Dense Hermitian matrix, row-major storage.
struct HermitianMatrix {
  int dim = 0;
  cvec entries;  // dim*dim, row-major

  static HermitianMatrix zero(int dim);

  cplx& at(int r, int c) { return entries[static_cast<size_t>(r) * dim + c]; }
  const cplx& at(int r, int c) const {
    return entries[static_cast<size_t>(r) * dim + c];
  }

  double max_abs() const;
  /// max_{r,c} |A[r][c] - conj(A[c][r])|
  double hermiticity_deviation() const;
  /// A <- (A + A^dagger)/2, making mirror entries exact conjugates.
  void symmetrize();
};

/// Result of a dense Hermitian eigendecomposition. Eigenvalues ascend;
/// column k of `vectors` (row-major, dim x dim) pairs with eigenvalues[k].
/// Each column's phase is fixed so its largest-magnitude entry is real
/// positive (first index on ties), making outputs deterministic.
struct EigenDecomposition {
  int dim = 0;
  std::vector<double> eigenvalues;
  cvec vectors;  // row-major; column k = eigenvector k

  cplx vec_at(int row, int col) const {
    return vectors[static_cast<size_t>(row) * dim + col];
  }
  cvec column(int col) const;
};

/// Ordinary least-squares line fit.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

}  // namespace oscsim
