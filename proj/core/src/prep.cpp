#include "oscsim/prep.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "oscsim/numerics.hpp"

namespace oscsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

GaussianPrepParams GaussianPrepParams::compute(const GridSpec& grid,
                                               double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("gaussian prep: delta must be positive");
  }
  GaussianPrepParams params;
  params.delta = delta;
  params.sigma_sq = std::numbers::pi * delta / grid.n;
  if (!(params.sigma_sq < 0.5)) {
    throw std::invalid_argument(
        "gaussian prep: pi * delta / N must stay below 1/2");
  }
  params.t = std::sqrt(params.sigma_sq * (2.0 - 4.0 * params.sigma_sq)) / 2.0;
  params.t_prime =
      1.0 / (4.0 * params.t + 4.0 * params.sigma_sq * params.sigma_sq / params.t);
  return params;
}

cvec gaussian_state(const GridSpec& grid, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("gaussian_state: delta must be positive");
  }
  const int half = grid.n / 2;
  double kappa = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double j = i - half;
    kappa += std::exp(-j * j / delta);
  }
  const double scale = 1.0 / std::sqrt(kappa);
  cvec state(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double j = i - half;
    state[i] = scale * std::exp(-j * j / (2.0 * delta));
  }
  return state;
}

cvec truncated_gaussian_prep(const GridSpec& grid, double delta, double eps) {
  if (!(eps > 0.0) || eps >= 1.0) {
    throw std::invalid_argument(
        "truncated_gaussian_prep: eps must be in (0, 1)");
  }
  const int j0 =
      static_cast<int>(std::ceil(std::sqrt(2.0 * delta * std::log(1.0 / eps))));
  cvec state = gaussian_state(grid, delta);
  const int half = grid.n / 2;
  for (int i = 0; i < grid.n; ++i) {
    if (std::abs(i - half) > j0) state[i] = 0.0;
  }
  return normalized(state);
}

GroundPrepResult prepare_ground(const GridSpec& grid, double delta,
                                const GroundPrepOptions& options) {
  GroundPrepResult result;
  result.params = GaussianPrepParams::compute(grid, delta);
  const double t = options.t_override.value_or(result.params.t);
  const double t_prime = options.t_prime_override.value_or(result.params.t_prime);

  cvec state = gaussian_state(grid, delta);
  // exp(+i p^2 t) (or the deliberately wrong sign), then exp(+i x^2 t').
  const double theta_p = options.flip_p2_sign ? t : -t;
  state = apply_quadratic_phase(state, QuadraticGenerator::P2, theta_p, grid);
  state = apply_quadratic_phase(state, QuadraticGenerator::X2, -t_prime, grid);

  const cvec target = normalized(make_hermite_state(grid, 0, true).amplitudes);
  const cplx overlap = inner(target, state);
  result.params.alpha = std::arg(overlap);
  const cplx unphase = std::polar(1.0, -result.params.alpha);
  cvec aligned(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) aligned[i] = unphase * state[i];
  result.error = dist2(target, aligned);
  result.state = std::move(state);
  return result;
}

struct JCSystem::Cache {
  std::once_flag flag;
  EigenDecomposition eig;
};

JCSystem::JCSystem(GridSpec grid, HermitianMatrix h)
    : grid_(grid), h_(std::move(h)), cache_(std::make_shared<Cache>()) {
  if (h_.dim != 2 * grid_.n) {
    throw std::invalid_argument("JCSystem: matrix dimension must be 2N");
  }
}

const EigenDecomposition& JCSystem::eigensystem() const {
  std::call_once(cache_->flag, [this] { cache_->eig = eigh(h_); });
  return cache_->eig;
}

JCSystem jc_build(const GridSpec& grid) {
  const int n = grid.n;
  HermitianMatrix h = HermitianMatrix::zero(2 * n);
  // x (x) sx / sqrt 2: block-diagonal in the oscillator index.
  for (int j = 0; j < n; ++j) {
    const double xj = grid.x_at(j) * kInvSqrt2;
    h.at(2 * j, 2 * j + 1) += xj;
    h.at(2 * j + 1, 2 * j) += xj;
  }
  // -p (x) sy / sqrt 2 with p built column-by-column from unit vectors.
  const DiagonalOperator p_op = momentum_operator(grid);
  cvec unit(n, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    unit[k] = 1.0;
    const cvec col = p_op.apply(unit);
    unit[k] = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx pjk = col[j] * kInvSqrt2;
      // sy = [[0, -i], [i, 0]]
      h.at(2 * j, 2 * k + 1) -= pjk * cplx(0.0, -1.0);
      h.at(2 * j + 1, 2 * k) -= pjk * cplx(0.0, 1.0);
    }
  }
  const double dev = h.hermiticity_deviation();
  if (dev > 1e-10 * std::max(1.0, h.max_abs())) {
    throw numerical_error("jc_build: assembled matrix is not Hermitian");
  }
  h.symmetrize();
  return JCSystem(grid, std::move(h));
}

double jc_rung_time(int n) {
  if (n < 0) throw std::invalid_argument("jc_rung_time: n must be >= 0");
  return std::numbers::pi / (2.0 * std::sqrt(n + 1.0));
}

cvec jc_exact_step(const JCSystem& system, int n, const cvec& state) {
  const double t = jc_rung_time(n);
  const EigenDecomposition& eig = system.eigensystem();
  const int dim = eig.dim;
  if (static_cast<int>(state.size()) != dim) {
    throw std::invalid_argument("jc_exact_step: dimension mismatch");
  }
  cvec modal(dim, cplx(0.0));
  for (int k = 0; k < dim; ++k) {
    cplx acc = 0.0;
    for (int r = 0; r < dim; ++r) acc += std::conj(eig.vec_at(r, k)) * state[r];
    modal[k] = acc * std::polar(1.0, -eig.eigenvalues[k] * t);
  }
  cvec out(dim, cplx(0.0));
  for (int r = 0; r < dim; ++r) {
    cplx acc = 0.0;
    for (int k = 0; k < dim; ++k) acc += eig.vec_at(r, k) * modal[k];
    out[r] = acc;
  }
  return out;
}

cvec jc_split_step(const GridSpec& grid, double s, const cvec& state) {
  const int n = grid.n;
  if (static_cast<int>(state.size()) != 2 * n) {
    throw std::invalid_argument("jc_split_step: dimension mismatch");
  }
  const double theta = s * kInvSqrt2;

  // exp(+i theta p (x) sy): rotate the qubit into the sy eigenbasis
  // (w0 at +1, w1 at -1), give each branch the matching momentum phase.
  cvec w0(n), w1(n);
  for (int j = 0; j < n; ++j) {
    const cplx u = state[2 * j];
    const cplx v = state[2 * j + 1];
    w0[j] = (u - cplx(0.0, 1.0) * v) * kInvSqrt2;
    w1[j] = (u + cplx(0.0, 1.0) * v) * kInvSqrt2;
  }
  // exp(-i theta' x^2)-style machinery does not apply here: the phase is
  // linear in p, so go through the centered DFT directly.
  auto momentum_phase = [&](cvec& w, double sign) {
    cvec f = centered_dft_apply(w, FftDirection::forward);
    for (int j = 0; j < n; ++j) {
      f[j] *= std::polar(1.0, sign * theta * grid.x_at(j));
    }
    w = centered_dft_apply(f, FftDirection::inverse);
  };
  momentum_phase(w0, +1.0);
  momentum_phase(w1, -1.0);

  // Back to the computational qubit basis, then exp(-i theta x (x) sx):
  // Hadamard pairs pick up opposite position phases.
  cvec out(2 * n);
  for (int j = 0; j < n; ++j) {
    const cplx u = (w0[j] + w1[j]) * kInvSqrt2;
    const cplx v = cplx(0.0, 1.0) * (w0[j] - w1[j]) * kInvSqrt2;
    const cplx plus = (u + v) * kInvSqrt2 * std::polar(1.0, -theta * grid.x_at(j));
    const cplx minus = (u - v) * kInvSqrt2 * std::polar(1.0, theta * grid.x_at(j));
    out[2 * j] = (plus + minus) * kInvSqrt2;
    out[2 * j + 1] = (plus - minus) * kInvSqrt2;
  }
  return out;
}

LadderResult ladder_prepare(const GridSpec& grid, int n_target, double eps,
                            LadderMode mode, const LadderOptions& options) {
  if (n_target < 0 || n_target > grid.max_trusted_index()) {
    throw std::invalid_argument(
        "ladder_prepare: target outside the trusted low-energy range");
  }
  if (mode == LadderMode::trotter && !(eps > 0.0)) {
    throw std::invalid_argument("ladder_prepare: eps must be positive");
  }
  const ModelHamiltonian osc = build_hamiltonian(grid, HamiltonianKind::qho);
  const int n = grid.n;

  cvec start(2 * n, cplx(0.0));
  if (options.start_from_prepared_gaussian) {
    const GroundPrepResult prep = prepare_ground(grid, options.prep_delta);
    for (int j = 0; j < n; ++j) start[2 * j] = prep.state[j];
  } else {
    const cvec ground = osc.eigensystem().column(0);
    for (int j = 0; j < n; ++j) start[2 * j] = ground[j];
  }

  std::optional<JCSystem> system;
  if (mode == LadderMode::exact) system.emplace(jc_build(grid));
  cvec state = std::move(start);
  for (int rung = 0; rung < n_target; ++rung) {
    if (mode == LadderMode::exact) {
      state = jc_exact_step(*system, rung, state);
    } else {
      const long m = static_cast<long>(
          std::ceil(options.trotter_c * n_target / eps));
      const double span = jc_rung_time(rung) / static_cast<double>(m);
      for (long step = 0; step < m; ++step) {
        state = jc_split_step(grid, span, state);
      }
    }
    for (int j = 0; j < n; ++j) std::swap(state[2 * j], state[2 * j + 1]);
  }

  const cvec target = osc.eigensystem().column(n_target);
  cplx overlap = 0.0;
  for (int j = 0; j < n; ++j) overlap += std::conj(target[j]) * state[2 * j];
  return LadderResult{std::move(state), std::abs(overlap)};
}

}  // namespace oscsim
