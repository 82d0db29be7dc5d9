#pragma once

#include "oscsim/oscillator.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

enum class SplittingKind { qho, quartic };

/// Symmetric product-formula schedule. `steps` lists (generator, duration)
/// factors of the operator product left-to-right; application therefore
/// consumes them right-to-left. Adjacent steps sharing a generator are merged
/// (the generators commute with themselves), and the pre-merge factor count
/// is kept as raw_count = 3 * 5^(p-1).
struct GeneratorSchedule {
  std::vector<std::pair<QuadraticGenerator, double>> steps;
  int order = 1;     // p
  double span = 0.0; // s
  long raw_count = 0;

  long merged_count() const { return static_cast<long>(steps.size()); }
};

/// Builds the order-p schedule for span s. Order 1 is the symmetric split
///   exp(-i s A/4) exp(-i s p^2/2) exp(-i s A/4)
/// with A = x^2 (qho) or x^4 (quartic); order p+1 comes from the recursion
///   U_{p+1}(s) = U_p(s_p)^2 U_p(s - 4 s_p) U_p(s_p)^2,
///   s_p = s / (4 - 4^{1/(2p+1)}).
/// Requires 1 <= p <= 6.
GeneratorSchedule build_schedule(int p, double s, SplittingKind splitting);

/// Applies the schedule's product to a state (rightmost factor first).
cvec apply_schedule(const GeneratorSchedule& schedule, const cvec& state,
                    const GridSpec& grid);

/// exp(-i H t) |state> through the cached eigendecomposition.
cvec exact_propagate(const ModelHamiltonian& H, double t, const cvec& state);

/// || (U_p(s) - exp(-i H s)) |phi_n> || with |phi_n> the normalized sampled
/// Hermite state (qho) or the n-th eigenvector (quartic). Requires n within
/// the grid's trusted low-energy range.
double trotter_error(const ModelHamiltonian& H, const GridSpec& grid, int p,
                     double s, int n);

/// Step plan for simulating exp(-i H t) to within eps on modes up to n.
struct TrotterPlan {
  int p = 1;
  long k = 1;
  double s = 0.0;   // t / k
  long cost = 0;    // k * raw exponential count of the order-p schedule

  /// k * (n+2) * s^(2p+1): the quantity the (p, k) selection drives below eps.
  double realized_bound(int n) const;
};

/// Chooses p = ceil(sqrt(ln((n+2) t / eps) / (2 ln 5))) (at least 1) and
/// k = ceil(t * ((n+2) t / eps)^(1/(2p))), natural logarithms throughout.
/// Requires t > 0 and 0 < eps < 1.
TrotterPlan select_plan(int n, double t, double eps);

}  // namespace oscsim
