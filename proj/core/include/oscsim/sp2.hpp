#pragma once

#include <vector>

#include "oscsim/oscillator.hpp"
#include "oscsim/trotter.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

/// Element of the real Lie algebra sp(2) complexified: a*x^2 + b*p^2 +
/// c*{x,p}, with {x,p} = xp + px. The bracket closes on this span:
///   [x^2, p^2] = 2i {x,p},  [x^2, {x,p}] = 4i x^2,  [p^2, {x,p}] = -4i p^2.
struct Sp2Vector {
  cplx a = 0.0;  // x^2 coefficient
  cplx b = 0.0;  // p^2 coefficient
  cplx c = 0.0;  // {x,p} coefficient

  /// Largest component modulus (L-infinity over the three coefficients).
  double magnitude() const;
  bool is_zero() const { return a == 0.0 && b == 0.0 && c == 0.0; }

  Sp2Vector& operator+=(const Sp2Vector& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
  }
};

Sp2Vector operator*(cplx scale, const Sp2Vector& v);

/// Polynomial in a formal parameter s with Sp2Vector coefficients;
/// coefficients[d] multiplies s^d. max_degree caps growth under adjoint().
struct Sp2Poly {
  std::vector<Sp2Vector> coefficients;
  int max_degree = 500;

  /// Index of the last nonzero coefficient, or -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return degree() < 0; }

  /// Coefficient of s^d; zero beyond the stored range.
  Sp2Vector at(int d) const;

  /// Drops trailing exactly-zero coefficients.
  void trim();

  Sp2Poly& operator+=(const Sp2Poly& o);
};

/// Scalar polynomial in s with real coefficients; index = power of s.
using ScalarPoly = std::vector<double>;

/// Conjugation action of a quadratic exponential on the algebra:
/// returns the polynomial representing exp(-i sigma g) T exp(+i sigma g)
/// for g = x^2 or p^2, where sigma is a scalar polynomial in s and T is
/// the target polynomial. Closed form (terminating at second order):
///   g = x^2: a' = a + 4 sigma c + 4 sigma^2 b,  b' = b,  c' = c + 2 sigma b
///   g = p^2: a' = a,  b' = b + 4 sigma^2 a - 4 sigma c,  c' = c - 2 sigma a
/// so x^2 conjugation fixes x^2 and p^2 conjugation fixes p^2. Each call
/// raises the degree by at most 2 deg(sigma); exceeding the target's
/// max_degree throws std::invalid_argument.
Sp2Poly adjoint(QuadraticGenerator gen, const ScalarPoly& sigma,
                const Sp2Poly& target);

/// Trotter defect of the order-p product formula for H = (x^2 + p^2)/2,
/// as an exact polynomial in the step span s:
///   f_p(s) = U_p(s)^{-1} (d/ds U_p(s)) + iH.
/// With U_p(s) = prod_j exp(-i gamma_j s g_j) (merged schedule, factors
/// listed left to right), the right-logarithmic derivative expands to
///   sum_i Ad_{j=L-1..i+1}[exp(+i gamma_j s g_j)] (-i gamma_i g_i),
/// each term transported through adjoint() with sigma = -gamma_j s.
/// The degree-0 part cancels against iH up to roundoff; the lowest
/// surviving degree is 2p. Requires 1 <= p <= 3.
Sp2Poly defect_poly(int p, SplittingKind splitting = SplittingKind::qho);

/// Smallest power whose coefficient magnitude exceeds rel_tol times the
/// largest coefficient magnitude. Rejects the identically-zero polynomial.
int lowest_degree(const Sp2Poly& poly, double rel_tol);

/// Evaluates the polynomial at a numeric span (Horner scheme).
Sp2Vector evaluate(const Sp2Poly& poly, double s);

}  // namespace oscsim
