#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "oscsim/numerics.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

/// Real diagonal operator, either directly in the position basis or acting
/// through conjugation by the centered DFT (momentum basis).
struct DiagonalOperator {
  enum class Basis { position, momentum };
  Basis basis = Basis::position;
  std::vector<double> values;  // one entry per grid point, index order j = -N/2..

  /// Applies the operator to a state (momentum-basis operators sandwich the
  /// multiplication between forward and inverse centered DFTs).
  cvec apply(const cvec& state) const;
};

/// Position operator x_j = j * spacing as a DiagonalOperator.
DiagonalOperator position_operator(const GridSpec& grid);
/// Momentum operator: the position values acting in the momentum basis.
DiagonalOperator momentum_operator(const GridSpec& grid);

enum class HamiltonianKind { qho, quartic, custom_potential };

/// Dense grid Hamiltonian H = V(x) + (1/2) p^2 with p realized through the
/// centered DFT. The eigendecomposition is computed on first use and cached
/// (single-assignment; safe for concurrent readers).
class ModelHamiltonian {
 public:
  ModelHamiltonian(GridSpec grid, HamiltonianKind kind, HermitianMatrix matrix);

  const GridSpec& grid() const { return grid_; }
  HamiltonianKind kind() const { return kind_; }
  const HermitianMatrix& matrix() const { return matrix_; }
  /// Cached dense eigendecomposition (throws numerical_error on failure).
  const EigenDecomposition& eigensystem() const;

 private:
  struct EigCache;
  GridSpec grid_;
  HamiltonianKind kind_;
  HermitianMatrix matrix_;
  std::shared_ptr<EigCache> cache_;
};

/// Normalized Hermite function psi_n(x) evaluated by the three-term
/// recurrence on the functions themselves (never on raw polynomials):
///   psi_0 = pi^{-1/4} exp(-x^2/2),  psi_1 = sqrt(2) x psi_0,
///   psi_k = sqrt(2/k) x psi_{k-1} - sqrt((k-1)/k) psi_{k-2}.
/// |psi_n| < 1.09 for all arguments; when the Gaussian seed underflows the
/// result is exactly 0. Requires 0 <= n <= 10^6 and finite x.
double hermite_eval(int n, double x);

/// Grid sampling of psi_n with prefactor (2*pi/N)^{1/4}. When `aliased` the
/// sampling is periodized over shifts of the comb period T = sqrt(2*pi*N):
///   amplitudes_j = (2*pi/N)^{1/4} * sum_{|k| <= comb_cutoff} psi_n(x_j + kT),
/// which makes the state an exact centered-DFT eigenvector with eigenvalue
/// (-i)^n. The default cutoff K=3 keeps the discarded tail below 1e-15 per
/// site for n <= N/2.
struct HermiteState {
  int n = 0;
  bool aliased = false;
  int comb_cutoff = 3;
  cvec amplitudes;
};

HermiteState make_hermite_state(const GridSpec& grid, int n, bool aliased,
                                int comb_cutoff = 3);

/// Dense Hamiltonian assembly: diag(V) + (1/2) F_c^{-1} diag(x^2) F_c, then
/// symmetrized. A symmetrization deviation above 1e-9 * max-entry raises
/// numerical_error. For kind == custom_potential a potential V(x) is required.
ModelHamiltonian build_hamiltonian(
    const GridSpec& grid, HamiltonianKind kind,
    const std::function<double(double)>& potential = nullptr);

enum class QuadraticGenerator { X2, P2, X4, potential };

/// Applies exp(-i * theta * G) for G in {x^2, p^2, x^4, V(x)}. The x-diagonal
/// cases multiply pointwise phases; P2 conjugates the x^2 phase by the
/// centered DFT. Norm is preserved to machine precision.
cvec apply_quadratic_phase(
    const cvec& state, QuadraticGenerator generator, double theta,
    const GridSpec& grid,
    const std::function<double(double)>& potential = nullptr);

/// Exact continuum matrix element <psi_m| p^l1 x^l2 |psi_n> evaluated in a
/// truncated ladder basis of dimension max(m,n)+l1+l2+1 (exact: polynomial
/// operators couple finitely many levels). Requires l1 + l2 <= 8.
cplx cv_matrix_element(int l1, int l2, int m, int n);

/// Grid counterpart <psi_m^d| (p^d)^l1 (x^d)^l2 |psi_n^d> via diagonal-operator
/// applications on the sampled Hermite states. Requires m, n <= N/2.
cplx discrete_matrix_element(const GridSpec& grid, int l1, int l2, int m, int n);

/// Entry (m, n) = |<phi_m | psi_n^d>| for m, n <= max_n, phi from the cached
/// eigendecomposition and psi_n^d normalized; row-major (max_n+1)^2 values.
std::vector<double> overlap_matrix(const ModelHamiltonian& H, int max_n);

}  // namespace oscsim
