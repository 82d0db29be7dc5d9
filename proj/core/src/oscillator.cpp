#include "oscsim/oscillator.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace oscsim {

cvec DiagonalOperator::apply(const cvec& state) const {
  if (state.size() != values.size()) {
    throw std::invalid_argument("DiagonalOperator: dimension mismatch");
  }
  if (basis == Basis::position) {
    cvec out(state.size());
    for (size_t i = 0; i < state.size(); ++i) out[i] = values[i] * state[i];
    return out;
  }
  cvec f = centered_dft_apply(state, FftDirection::forward);
  for (size_t i = 0; i < f.size(); ++i) f[i] *= values[i];
  return centered_dft_apply(f, FftDirection::inverse);
}

DiagonalOperator position_operator(const GridSpec& grid) {
  DiagonalOperator op;
  op.basis = DiagonalOperator::Basis::position;
  op.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) op.values[i] = grid.x_at(i);
  return op;
}

DiagonalOperator momentum_operator(const GridSpec& grid) {
  DiagonalOperator op = position_operator(grid);
  op.basis = DiagonalOperator::Basis::momentum;
  return op;
}

struct ModelHamiltonian::EigCache {
  std::once_flag flag;
  EigenDecomposition eig;
};

ModelHamiltonian::ModelHamiltonian(GridSpec grid, HamiltonianKind kind,
                                   HermitianMatrix matrix)
    : grid_(grid),
      kind_(kind),
      matrix_(std::move(matrix)),
      cache_(std::make_shared<EigCache>()) {}

const EigenDecomposition& ModelHamiltonian::eigensystem() const {
  std::call_once(cache_->flag, [this] { cache_->eig = eigh(matrix_); });
  return cache_->eig;
}

double hermite_eval(int n, double x) {
  if (n < 0 || n > 1000000) {
    throw std::invalid_argument("hermite_eval: index out of range");
  }
  if (!std::isfinite(x)) {
    throw std::invalid_argument("hermite_eval: non-finite argument");
  }
  const double seed = std::exp(-0.5 * x * x);
  if (seed == 0.0) return 0.0;  // tail beyond double range; the true value is below 1e-300
  double prev = std::pow(std::numbers::pi, -0.25) * seed;
  if (n == 0) return prev;
  double cur = std::sqrt(2.0) * x * prev;
  for (int k = 2; k <= n; ++k) {
    const double next =
        std::sqrt(2.0 / k) * x * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteState make_hermite_state(const GridSpec& grid, int n, bool aliased,
                                int comb_cutoff) {
  if (n < 0) throw std::invalid_argument("make_hermite_state: n must be >= 0");
  if (comb_cutoff < 0) {
    throw std::invalid_argument("make_hermite_state: negative comb cutoff");
  }
  HermiteState state;
  state.n = n;
  state.aliased = aliased;
  state.comb_cutoff = aliased ? comb_cutoff : 0;
  state.amplitudes.resize(grid.n);
  const double prefactor = std::pow(2.0 * std::numbers::pi / grid.n, 0.25);
  const double period = grid.period();
  const int cutoff = state.comb_cutoff;
  for (int i = 0; i < grid.n; ++i) {
    double acc = 0.0;
    for (int k = -cutoff; k <= cutoff; ++k) {
      acc += hermite_eval(n, grid.x_at(i) + k * period);
    }
    state.amplitudes[i] = prefactor * acc;
  }
  return state;
}

ModelHamiltonian build_hamiltonian(
    const GridSpec& grid, HamiltonianKind kind,
    const std::function<double(double)>& potential) {
  if (kind == HamiltonianKind::custom_potential && !potential) {
    throw std::invalid_argument(
        "build_hamiltonian: custom_potential requires a potential function");
  }
  const int n = grid.n;
  std::vector<double> v(n), xsq(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.x_at(i);
    xsq[i] = x * x;
    switch (kind) {
      case HamiltonianKind::qho:
        v[i] = 0.5 * x * x;
        break;
      case HamiltonianKind::quartic:
        v[i] = 0.5 * x * x * x * x;
        break;
      case HamiltonianKind::custom_potential:
        v[i] = potential(x);
        break;
    }
  }

  // Column j of (1/2) F_c^{-1} diag(x^2) F_c, assembled through the same FFT
  // path the propagators use.
  HermitianMatrix H = HermitianMatrix::zero(n);
  cvec unit(n, cplx(0.0));
  for (int j = 0; j < n; ++j) {
    unit[j] = 1.0;
    cvec f = centered_dft_apply(unit, FftDirection::forward);
    for (int i = 0; i < n; ++i) f[i] *= 0.5 * xsq[i];
    cvec col = centered_dft_apply(f, FftDirection::inverse);
    for (int i = 0; i < n; ++i) H.at(i, j) = col[i];
    unit[j] = 0.0;
  }
  for (int i = 0; i < n; ++i) H.at(i, i) += v[i];

  const double dev = H.hermiticity_deviation();
  const double budget = 1e-9 * std::max(1.0, H.max_abs());
  if (dev > budget) {
    throw numerical_error("build_hamiltonian: symmetrization deviation " +
                          std::to_string(dev) + " exceeds budget " +
                          std::to_string(budget));
  }
  H.symmetrize();
  return ModelHamiltonian(grid, kind, std::move(H));
}

cvec apply_quadratic_phase(const cvec& state, QuadraticGenerator generator,
                           double theta, const GridSpec& grid,
                           const std::function<double(double)>& potential) {
  if (static_cast<int>(state.size()) != grid.n) {
    throw std::invalid_argument("apply_quadratic_phase: dimension mismatch");
  }
  if (generator == QuadraticGenerator::potential && !potential) {
    throw std::invalid_argument(
        "apply_quadratic_phase: potential generator requires a function");
  }
  auto diag_phase = [&](const cvec& in, auto&& f) {
    cvec out(in.size());
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.x_at(i);
      out[i] = in[i] * std::polar(1.0, -theta * f(x));
    }
    return out;
  };
  switch (generator) {
    case QuadraticGenerator::X2:
      return diag_phase(state, [](double x) { return x * x; });
    case QuadraticGenerator::X4:
      return diag_phase(state, [](double x) { return x * x * x * x; });
    case QuadraticGenerator::potential:
      return diag_phase(state, [&](double x) { return potential(x); });
    case QuadraticGenerator::P2: {
      cvec f = centered_dft_apply(state, FftDirection::forward);
      f = diag_phase(f, [](double x) { return x * x; });
      return centered_dft_apply(f, FftDirection::inverse);
    }
  }
  throw std::invalid_argument("apply_quadratic_phase: unknown generator");
}

cplx cv_matrix_element(int l1, int l2, int m, int n) {
  if (l1 < 0 || l2 < 0 || l1 + l2 > 8) {
    throw std::invalid_argument("cv_matrix_element: require 0 <= l1+l2 <= 8");
  }
  if (m < 0 || n < 0) {
    throw std::invalid_argument("cv_matrix_element: negative mode index");
  }
  const int dim = std::max(m, n) + l1 + l2 + 1;
  // Ladder-built x and p on the truncated basis: exact for this element since
  // p^l1 x^l2 |n> never reaches level max(m,n)+l1+l2+1 or above.
  auto apply_x = [&](const cvec& in) {
    cvec out(dim, cplx(0.0));
    for (int k = 0; k < dim; ++k) {
      // x |k> = sqrt(k/2) |k-1> + sqrt((k+1)/2) |k+1>
      if (k > 0) out[k - 1] += std::sqrt(k / 2.0) * in[k];
      if (k + 1 < dim) out[k + 1] += std::sqrt((k + 1) / 2.0) * in[k];
    }
    return out;
  };
  auto apply_p = [&](const cvec& in) {
    cvec out(dim, cplx(0.0));
    const cplx i_unit(0.0, 1.0);
    for (int k = 0; k < dim; ++k) {
      // p |k> = i sqrt((k+1)/2) |k+1> - i sqrt(k/2) |k-1>
      if (k > 0) out[k - 1] -= i_unit * std::sqrt(k / 2.0) * in[k];
      if (k + 1 < dim) out[k + 1] += i_unit * std::sqrt((k + 1) / 2.0) * in[k];
    }
    return out;
  };
  cvec w(dim, cplx(0.0));
  w[n] = 1.0;
  for (int rep = 0; rep < l2; ++rep) w = apply_x(w);
  for (int rep = 0; rep < l1; ++rep) w = apply_p(w);
  return w[m];
}

cplx discrete_matrix_element(const GridSpec& grid, int l1, int l2, int m,
                             int n) {
  if (l1 < 0 || l2 < 0 || l1 + l2 > 8) {
    throw std::invalid_argument(
        "discrete_matrix_element: require 0 <= l1+l2 <= 8");
  }
  if (m < 0 || n < 0 || m > grid.n / 2 || n > grid.n / 2) {
    throw std::invalid_argument(
        "discrete_matrix_element: mode index beyond N/2");
  }
  const DiagonalOperator x_op = position_operator(grid);
  cvec w = make_hermite_state(grid, n, false).amplitudes;
  for (int rep = 0; rep < l2; ++rep) w = x_op.apply(w);
  if (l1 > 0) {
    // (p^d)^l1 = F_c^{-1} diag(x^l1) F_c applied once.
    cvec f = centered_dft_apply(w, FftDirection::forward);
    for (int i = 0; i < grid.n; ++i) {
      f[i] *= std::pow(grid.x_at(i), l1);
    }
    w = centered_dft_apply(f, FftDirection::inverse);
  }
  const cvec bra = make_hermite_state(grid, m, false).amplitudes;
  return inner(bra, w);
}

std::vector<double> overlap_matrix(const ModelHamiltonian& H, int max_n) {
  const int n_grid = H.grid().n;
  if (max_n < 0 || max_n >= n_grid) {
    throw std::invalid_argument("overlap_matrix: require 0 <= max_n < N");
  }
  const EigenDecomposition& eig = H.eigensystem();
  const int count = max_n + 1;
  std::vector<double> out(static_cast<size_t>(count) * count, 0.0);
  std::vector<cvec> hermites(count);
  for (int k = 0; k < count; ++k) {
    hermites[k] = normalized(make_hermite_state(H.grid(), k, false).amplitudes);
  }
  for (int m = 0; m < count; ++m) {
    const cvec phi = eig.column(m);
    for (int k = 0; k < count; ++k) {
      out[static_cast<size_t>(m) * count + k] = std::abs(inner(phi, hermites[k]));
    }
  }
  return out;
}

}  // namespace oscsim
