#pragma once

#include <memory>
#include <optional>

#include "oscsim/oscillator.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

/// Derived quantities for the free-evolution + chirp ground-state recipe.
struct GaussianPrepParams {
  double delta = 0.0;     // width parameter of the seed Gaussian
  double sigma_sq = 0.0;  // pi * delta / N; the recipe needs sigma_sq < 1/2
  double t = 0.0;         // sqrt(sigma_sq * (2 - 4 sigma_sq)) / 2
  double t_prime = 0.0;   // 1 / (4 t + 4 sigma_sq^2 / t)
  double alpha = 0.0;     // global phase of the prepared state, see below

  /// Fills the derived fields (alpha stays 0 until a preparation runs).
  /// Rejects delta <= 0 and sigma_sq >= 1/2 (t would be undefined).
  static GaussianPrepParams compute(const GridSpec& grid, double delta);
};

/// Normalized discrete Gaussian: amplitudes exp(-j^2 / (2 delta)) / sqrt(k)
/// over the symmetric index range, with k = sum_j exp(-j^2 / delta), so the
/// norm is exactly 1 up to roundoff.
cvec gaussian_state(const GridSpec& grid, double delta);

/// Same Gaussian with amplitudes zeroed outside |j| <= j0,
/// j0 = ceil(sqrt(2 delta ln(1/eps))), then renormalized. The discarded
/// tail has norm at most eps. Requires 0 < eps < 1.
cvec truncated_gaussian_prep(const GridSpec& grid, double delta, double eps);

struct GroundPrepOptions {
  // Apply exp(-i p^2 t) instead of exp(+i p^2 t). The recipe only works
  // with the + sign; the switch exists to demonstrate that sensitivity.
  bool flip_p2_sign = false;
  std::optional<double> t_override;
  std::optional<double> t_prime_override;
};

struct GroundPrepResult {
  cvec state;
  double error = 0.0;  // || target - e^{-i alpha} state ||
  GaussianPrepParams params;
};

/// Ground-state preparation: applies exp(+i p^2 t) then exp(+i x^2 t') to
/// the discrete Gaussian. The target is the normalized periodized Hermite
/// ground state; alpha is fixed numerically so the overlap with the target
/// is real positive, and error is the distance after removing that phase.
GroundPrepResult prepare_ground(const GridSpec& grid, double delta,
                                const GroundPrepOptions& options = {});

/// Oscillator-qubit ladder Hamiltonian (x (x) sx - p (x) sy) / sqrt(2) on a
/// 2N-dimensional space, amplitude index 2*j + q with j the oscillator
/// storage index and q the qubit. Eigenvalues come in +/- pairs; the pair
/// at +/- sqrt(n+1) connects neighboring oscillator eigenstates.
class JCSystem {
 public:
  JCSystem(GridSpec grid, HermitianMatrix h);

  const GridSpec& grid() const { return grid_; }
  int dim() const { return h_.dim; }
  const HermitianMatrix& matrix() const { return h_; }
  /// Dense eigendecomposition, computed once on first use.
  const EigenDecomposition& eigensystem() const;

 private:
  struct Cache;
  GridSpec grid_;
  HermitianMatrix h_;
  std::shared_ptr<Cache> cache_;
};

/// Builds the ladder Hamiltonian with the momentum part realized densely
/// through centered-DFT applications on unit vectors.
JCSystem jc_build(const GridSpec& grid);

/// Rung duration t_n = pi / (2 sqrt(n + 1)); a half Rabi period of the
/// +/- sqrt(n+1) eigenvalue pair.
double jc_rung_time(int n);

/// Applies exp(-i H_JC t_n) through the dense eigendecomposition.
cvec jc_exact_step(const JCSystem& system, int n, const cvec& state);

/// One first-order splitting step
///   W(s) = exp(-i (x (x) sx) s / sqrt 2) * exp(+i (p (x) sy) s / sqrt 2)
/// applied without dense matrices: the qubit factor is rotated into the
/// sx (resp. sy) eigenbasis and each branch picks up a position (resp.
/// momentum) phase, the latter through a centered-DFT sandwich.
cvec jc_split_step(const GridSpec& grid, double s, const cvec& state);

enum class LadderMode { exact, trotter };

struct LadderOptions {
  double trotter_c = 4.0;  // steps per rung: m = ceil(c * n_target / eps)
  bool start_from_prepared_gaussian = false;
  double prep_delta = 8.0;
};

struct LadderResult {
  cvec state;             // dimension 2N
  double fidelity = 0.0;  // |<phi_{n_target}, qubit 0 | state>|
};

/// Climbs the eigenstate ladder: starting from the ground eigenvector at
/// qubit 0 (or from prepare_ground's output), applies rungs
/// (1 (x) sx) exp(-i H_JC t_n) for n = 0 .. n_target-1. In trotter mode
/// each rung is split into m = ceil(trotter_c * n_target / eps) steps of
/// jc_split_step at span t_n / m. Requires n_target within the grid's
/// trusted low-energy range.
LadderResult ladder_prepare(const GridSpec& grid, int n_target, double eps,
                            LadderMode mode, const LadderOptions& options = {});

}  // namespace oscsim
