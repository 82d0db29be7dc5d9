#pragma once

#include "oscsim/types.hpp"

namespace oscsim {

enum class FftDirection { forward, inverse };

/// Unitary DFT on indices 0..N-1. The forward kernel is
/// exp(+2*pi*i*j*k/N)/sqrt(N); inverse is its conjugate. Any positive length
/// is accepted. inverse(forward(v)) == v to machine precision.
cvec fft_unitary(const cvec& v, FftDirection direction);

/// Centered DFT on symmetric indices j,k = -N/2 .. N/2-1 (N even), realized
/// as cyclic index shifts around a plain DFT. The forward kernel is
/// exp(-2*pi*i*j*k/N)/sqrt(N): with this sign the periodized Hermite state
/// of index n is an eigenvector with eigenvalue (-i)^n, and conjugating the
/// position operator yields the momentum operator with the conventional
/// sign. Applying forward four times is the identity.
cvec centered_dft_apply(const cvec& v, FftDirection direction);

/// Dense Hermitian eigendecomposition: Householder tridiagonalization
/// followed by implicit-shift QL, capped at 50 sweeps per eigenvalue
/// (numerical_error on exhaustion, naming the offending index).
/// Eigenvalues ascend; eigenvector phases are fixed deterministically.
EigenDecomposition eigh(const HermitianMatrix& H);

/// Ordinary least squares of ys against xs. Requires >= 3 points and a
/// non-degenerate abscissa (throws std::invalid_argument otherwise).
FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// --- small vector helpers used across modules ---

/// Euclidean norm.
double norm2(const cvec& v);
/// <a|b> = sum_i conj(a_i) * b_i.
cplx inner(const cvec& a, const cvec& b);
/// ||a - b||.
double dist2(const cvec& a, const cvec& b);
/// v / ||v||; throws std::invalid_argument on the zero vector.
cvec normalized(const cvec& v);

}  // namespace oscsim
