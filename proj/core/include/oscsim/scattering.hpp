#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "oscsim/oscillator.hpp"
#include "oscsim/trotter.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

/// Expansion coefficients c_0 .. c_{N'} of a low-energy state over the
/// periodized Hermite basis. Unit norm is part of the contract.
struct SpectralCoefficients {
  cvec coeffs;

  int n_prime() const { return static_cast<int>(coeffs.size()) - 1; }

  /// Normalizes the given coefficients; rejects empty or zero input.
  static SpectralCoefficients make(cvec raw);
};

/// Closed-form reference amplitude sum_n (c'_n)* c_n exp(-i (n + 1/2) t).
/// Requires matching coefficient counts.
cplx cv_amplitude(const SpectralCoefficients& c,
                  const SpectralCoefficients& c_prime, double t);

struct AmplitudeOptions {
  // Absent: exact eigenbasis propagation. Present: the product-formula
  // schedule of the plan applied plan.k times.
  std::optional<TrotterPlan> plan;
  // Absent: project onto the c' superposition. Present: return the evolved
  // amplitude at symmetric grid index j.
  std::optional<int> position_j;
};

/// Norm deviations of the two superpositions from 1 before renormalizing.
struct AmplitudeDiag {
  double alpha_dev = 0.0;
  double alpha_prime_dev = 0.0;
};

/// Discrete counterpart of cv_amplitude: builds the normalized
/// superposition of periodized Hermite states from c, evolves it under the
/// discrete QHO for time t, and projects per options. Both coefficient
/// sets must fit inside the grid's trusted low-energy range.
cplx discrete_amplitude(const GridSpec& grid, const SpectralCoefficients& c,
                        const SpectralCoefficients& c_prime, double t,
                        const AmplitudeOptions& options = {},
                        AmplitudeDiag* diag = nullptr);

/// The normalized superposition sum_n c_n |psi_n^d> of periodized Hermite
/// states that discrete_amplitude evolves; exposed so interferometric
/// callers can prepare the identical state.
cvec spectral_state(const GridSpec& grid, const SpectralCoefficients& c);

/// Dense unitary (as columns) whose first column is the given state,
/// completed deterministically from the standard basis by twice-iterated
/// Gram-Schmidt. Rejects vectors more than 1e-8 away from unit norm.
std::vector<cvec> completion_unitary(const cvec& state);

using UnitaryApplier = std::function<cvec(const cvec&)>;

struct HadamardTestOptions {
  long shots = 0;          // 0 = exact expectation values
  std::uint64_t seed = 0;  // consumed only when shots > 0
};

/// Ancilla interferometry estimate of <e_0|V|e_0> for a norm-preserving
/// applier V on dimension dim: the sigma_x readout of the control qubit
/// gives the real part and the sigma_y readout the imaginary part. With
/// shots > 0 each readout is sampled from Bernoulli outcomes driven by
/// counter-based uniforms keyed on (seed, readout, shot index), so the
/// estimate does not depend on how shots are partitioned across workers.
cplx hadamard_test(const UnitaryApplier& v, int dim,
                   const HadamardTestOptions& options = {});

enum class PropagationMethod { exact, plan };

/// Fractional Fourier transform e^{i a pi/4} U^d(a pi/2) samples: periodized
/// Hermite inputs acquire the eigenphase e^{-i n a pi/2}, order 1
/// approximates the centered DFT on low-energy signals, and order 0 returns
/// the signal verbatim. With method = plan, the propagator is the product
/// formula chosen by select_plan for the grid's trusted range at accuracy
/// eps (negative orders run the schedule backwards).
cvec frft_apply(const GridSpec& grid, const cvec& signal, double order,
                PropagationMethod method = PropagationMethod::exact,
                double eps = 1e-6);

}  // namespace oscsim
