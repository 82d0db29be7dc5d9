#include "oscsim/scattering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oscsim/numerics.hpp"

namespace oscsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) determined entirely by (seed, stream, index).
double shot_uniform(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t index) {
  const std::uint64_t base = splitmix64(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
  const std::uint64_t z = splitmix64(base + 0x9e3779b97f4a7c15ULL * index);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Mean of +/-1 Bernoulli outcomes with P(+1) = (1 + value) / 2.
double sampled_expectation(double value, long shots, std::uint64_t seed,
                           std::uint64_t stream) {
  const double p_plus = std::min(1.0, std::max(0.0, (1.0 + value) / 2.0));
  long plus = 0;
  for (long i = 0; i < shots; ++i) {
    if (shot_uniform(seed, stream, static_cast<std::uint64_t>(i)) < p_plus) {
      ++plus;
    }
  }
  return 2.0 * static_cast<double>(plus) / static_cast<double>(shots) - 1.0;
}

// Normalized superposition sum_n c_n |psi_n^d> of periodized Hermite states.
cvec superpose(const GridSpec& grid, const SpectralCoefficients& c,
               double* norm_dev) {
  cvec acc(grid.n, cplx(0.0));
  for (int n = 0; n <= c.n_prime(); ++n) {
    const cvec basis = make_hermite_state(grid, n, true).amplitudes;
    for (int i = 0; i < grid.n; ++i) acc[i] += c.coeffs[n] * basis[i];
  }
  const double norm = norm2(acc);
  if (norm_dev != nullptr) *norm_dev = std::abs(norm - 1.0);
  if (norm == 0.0) {
    throw std::invalid_argument("discrete_amplitude: zero superposition");
  }
  for (auto& a : acc) a /= norm;
  return acc;
}

}  // namespace

SpectralCoefficients SpectralCoefficients::make(cvec raw) {
  if (raw.empty()) {
    throw std::invalid_argument("SpectralCoefficients: empty coefficients");
  }
  const double norm = norm2(raw);
  if (norm == 0.0) {
    throw std::invalid_argument("SpectralCoefficients: zero coefficients");
  }
  for (auto& c : raw) c /= norm;
  return SpectralCoefficients{std::move(raw)};
}

cvec spectral_state(const GridSpec& grid, const SpectralCoefficients& c) {
  if (c.n_prime() > grid.max_trusted_index()) {
    throw std::invalid_argument(
        "spectral_state: coefficients exceed the trusted low-energy range");
  }
  return superpose(grid, c, nullptr);
}

std::vector<cvec> completion_unitary(const cvec& state) {
  const int n = static_cast<int>(state.size());
  if (n < 1) throw std::invalid_argument("completion_unitary: empty state");
  if (std::abs(norm2(state) - 1.0) > 1e-8) {
    throw std::invalid_argument("completion_unitary: state must be unit norm");
  }
  std::vector<cvec> cols;
  cols.reserve(n);
  cols.push_back(normalized(state));
  for (int k = 0; k < n && static_cast<int>(cols.size()) < n; ++k) {
    cvec v(n, cplx(0.0));
    v[k] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const cvec& col : cols) {
        const cplx coef = inner(col, v);
        for (int i = 0; i < n; ++i) v[i] -= coef * col[i];
      }
    }
    const double residual = norm2(v);
    if (residual > 1e-6) {
      for (auto& entry : v) entry /= residual;
      cols.push_back(std::move(v));
    }
  }
  if (static_cast<int>(cols.size()) != n) {
    throw numerical_error("completion_unitary: basis completion failed");
  }
  return cols;
}

cplx cv_amplitude(const SpectralCoefficients& c,
                  const SpectralCoefficients& c_prime, double t) {
  if (c.coeffs.size() != c_prime.coeffs.size()) {
    throw std::invalid_argument("cv_amplitude: coefficient counts differ");
  }
  cplx acc = 0.0;
  for (int n = 0; n <= c.n_prime(); ++n) {
    acc += std::conj(c_prime.coeffs[n]) * c.coeffs[n] *
           std::polar(1.0, -(n + 0.5) * t);
  }
  return acc;
}

cplx discrete_amplitude(const GridSpec& grid, const SpectralCoefficients& c,
                        const SpectralCoefficients& c_prime, double t,
                        const AmplitudeOptions& options, AmplitudeDiag* diag) {
  const int trusted = grid.max_trusted_index();
  if (c.n_prime() > trusted || c_prime.n_prime() > trusted) {
    throw std::invalid_argument(
        "discrete_amplitude: coefficients exceed the trusted low-energy range");
  }
  AmplitudeDiag local;
  cvec state = superpose(grid, c, &local.alpha_dev);

  if (options.plan.has_value()) {
    const TrotterPlan& plan = *options.plan;
    const GeneratorSchedule schedule =
        build_schedule(plan.p, plan.s, SplittingKind::qho);
    for (long step = 0; step < plan.k; ++step) {
      state = apply_schedule(schedule, state, grid);
    }
  } else {
    const ModelHamiltonian H = build_hamiltonian(grid, HamiltonianKind::qho);
    state = exact_propagate(H, t, state);
  }

  cplx result;
  if (options.position_j.has_value()) {
    const int j = *options.position_j;
    if (j < grid.j_min() || j > grid.j_max()) {
      throw std::invalid_argument("discrete_amplitude: index off the grid");
    }
    result = state[j + grid.n / 2];
  } else {
    const cvec probe = superpose(grid, c_prime, &local.alpha_prime_dev);
    result = inner(probe, state);
  }
  if (diag != nullptr) *diag = local;
  return result;
}

cplx hadamard_test(const UnitaryApplier& v, int dim,
                   const HadamardTestOptions& options) {
  if (dim < 1) throw std::invalid_argument("hadamard_test: dim must be >= 1");
  cvec input(dim, cplx(0.0));
  input[0] = 1.0;
  const cvec branch = v(input);
  if (static_cast<int>(branch.size()) != dim) {
    throw std::invalid_argument("hadamard_test: applier changed dimension");
  }
  // Control state (|0>|e_0> + |1>|V e_0>)/sqrt2; sigma_x / sigma_y
  // expectations of the control reduce to the overlap <e_0|V e_0>.
  const cplx overlap = branch[0];
  if (options.shots <= 0) return overlap;
  const double re =
      sampled_expectation(overlap.real(), options.shots, options.seed, 0);
  const double im =
      sampled_expectation(overlap.imag(), options.shots, options.seed, 1);
  return cplx(re, im);
}

cvec frft_apply(const GridSpec& grid, const cvec& signal, double order,
                PropagationMethod method, double eps) {
  if (static_cast<int>(signal.size()) != grid.n) {
    throw std::invalid_argument("frft_apply: dimension mismatch");
  }
  if (order == 0.0) return signal;
  const double t = order * std::numbers::pi / 2.0;

  cvec state;
  if (method == PropagationMethod::exact) {
    const ModelHamiltonian H = build_hamiltonian(grid, HamiltonianKind::qho);
    state = exact_propagate(H, t, signal);
  } else {
    const TrotterPlan plan =
        select_plan(grid.max_trusted_index(), std::abs(t), eps);
    const GeneratorSchedule schedule =
        build_schedule(plan.p, t / static_cast<double>(plan.k),
                       SplittingKind::qho);
    state = signal;
    for (long step = 0; step < plan.k; ++step) {
      state = apply_schedule(schedule, state, grid);
    }
  }
  const cplx prefactor = std::polar(1.0, order * std::numbers::pi / 4.0);
  for (auto& a : state) a *= prefactor;
  return state;
}

}  // namespace oscsim
