#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <doctest.h>

#include "oscsim/numerics.hpp"
#include "oscsim/oscillator.hpp"
#include "oscsim/types.hpp"

using namespace oscsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// psi_5 from the closed-form physicists' polynomial H_5 = 32x^5 - 160x^3 +
// 120x, normalized by sqrt(2^5 5! sqrt(pi)).
double psi5_reference(double x) {
  const double h5 = 32.0 * std::pow(x, 5) - 160.0 * std::pow(x, 3) + 120.0 * x;
  return h5 * std::exp(-0.5 * x * x) /
         std::sqrt(32.0 * 120.0 * std::sqrt(kPi));
}

// Trapezoid integral of f over [-L, L] with 2M+1 samples. The integrands
// here decay like exp(-x^2), so the rule converges spectrally in M.
double trapezoid(const std::function<double(double)>& f, double l, int m) {
  const double h = l / m;
  double acc = 0.5 * (f(-l) + f(l));
  for (int i = 1; i < 2 * m; ++i) acc += f(-l + h * i);
  return acc * h;
}

// Five-point central first derivative, O(h^4).
double d1(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12 * h);
}

// Five-point central second derivative, O(h^4).
double d2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) -
          f(x - 2 * h)) /
         (12 * h * h);
}

// Quadrature oracle for <psi_m| p^l1 x^l2 |psi_n> with l1 <= 2: the x power
// multiplies pointwise and p^l1 = (-i d/dx)^l1 acts by finite differences
// on the smooth product x^l2 psi_n(x). Entirely pointwise, no ladder
// algebra shared with the library implementation.
cplx quadrature_element(int l1, int l2, int m, int n) {
  auto ket = [l2, n](double x) {
    return std::pow(x, l2) * hermite_eval(n, x);
  };
  const double h = 5e-3;
  auto derivative = [&](double x) -> double {
    if (l1 == 0) return ket(x);
    if (l1 == 1) return d1(ket, x, h);
    return d2(ket, x, h);
  };
  const double integral = trapezoid(
      [&](double x) { return hermite_eval(m, x) * derivative(x); }, 12.0,
      4800);
  // p^l1 = (-i)^l1 d^l1/dx^l1; the derivative integral itself is real.
  const cplx prefactor = std::pow(cplx(0.0, -1.0), l1);
  return prefactor * integral;
}

cvec sampled_gaussian(const GridSpec& grid) {
  cvec v(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x_at(i);
    v[i] = std::exp(-0.5 * x * x);
  }
  return normalized(v);
}

}  // namespace

TEST_CASE("grid construction and geometry") {
  const auto grid = GridSpec::make(64);
  CHECK(grid.spacing == doctest::Approx(std::sqrt(2.0 * kPi / 64.0)));
  CHECK(grid.x_at(32) == 0.0);
  CHECK(grid.x_at(0) == doctest::Approx(-32.0 * grid.spacing));
  CHECK(grid.period() == doctest::Approx(std::sqrt(2.0 * kPi * 64.0)));
  CHECK(grid.max_trusted_index() == 32);

  CHECK_THROWS_AS(GridSpec::make(63), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::make(2), std::invalid_argument);
}

TEST_CASE("hermite_eval matches the closed-form fifth mode") {
  for (double x : {-3.1, -1.0, 0.0, 0.4, 1.7, 2.9}) {
    CHECK(hermite_eval(5, x) == doctest::Approx(psi5_reference(x)).epsilon(1e-12));
  }
}

TEST_CASE("hermite functions are orthonormal under quadrature") {
  for (int m = 0; m <= 6; ++m) {
    for (int n = m; n <= 6; ++n) {
      const double integral = trapezoid(
          [&](double x) { return hermite_eval(m, x) * hermite_eval(n, x); },
          10.0, 2000);
      const double want = (m == n) ? 1.0 : 0.0;
      CHECK(std::abs(integral - want) < 1e-10);
    }
  }
}

TEST_CASE("hermite_eval stays within the global amplitude bound") {
  for (int n : {0, 1, 7, 40}) {
    for (double x = -9.0; x <= 9.0; x += 0.37) {
      CHECK(std::abs(hermite_eval(n, x)) < 1.09);
    }
  }
  CHECK_THROWS_AS(hermite_eval(-1, 0.0), std::invalid_argument);
}

TEST_CASE("momentum operator reproduces p psi_0 = i x psi_0") {
  // The ground Gaussian satisfies -i d/dx psi_0 = i x psi_0; on the grid
  // this pins the sign of the centered-DFT conjugation.
  const auto grid = GridSpec::make(64);
  const cvec psi = sampled_gaussian(grid);
  const cvec p_psi = momentum_operator(grid).apply(psi);
  cvec want(grid.n);
  for (int i = 0; i < grid.n; ++i)
    want[i] = cplx(0.0, 1.0) * grid.x_at(i) * psi[i];
  CHECK(dist2(p_psi, want) < 1e-10);
}

TEST_CASE("aliased Hermite states are exact centered-DFT eigenvectors") {
  const auto grid = GridSpec::make(32);
  for (int n : {0, 1, 2, 5, 9, 16}) {
    const auto state = make_hermite_state(grid, n, true);
    const cvec transformed =
        centered_dft_apply(state.amplitudes, FftDirection::forward);
    const cplx phase = std::pow(cplx(0.0, -1.0), n);
    cvec want(grid.n);
    for (int i = 0; i < grid.n; ++i) want[i] = phase * state.amplitudes[i];
    CHECK(dist2(transformed, want) < 1e-12);
  }
}

TEST_CASE("sampled Hermite states carry unit norm up to aliasing") {
  const auto grid = GridSpec::make(64);
  for (int n : {0, 1, 4}) {
    const auto state = make_hermite_state(grid, n, false);
    CHECK(std::abs(norm2(state.amplitudes) - 1.0) < 1e-12);
  }
}

TEST_CASE("aliased Hermite states nearly diagonalize the discrete QHO") {
  const auto grid = GridSpec::make(64);
  const auto h = build_hamiltonian(grid, HamiltonianKind::qho);
  std::vector<cvec> states;
  for (int n = 0; n <= 4; ++n)
    states.push_back(make_hermite_state(grid, n, true).amplitudes);
  for (int m = 0; m <= 4; ++m) {
    cvec h_psi(grid.n, 0.0);
    for (int r = 0; r < grid.n; ++r) {
      cplx acc = 0.0;
      for (int c = 0; c < grid.n; ++c)
        acc += h.matrix().at(r, c) * states[m][c];
      h_psi[r] = acc;
    }
    for (int n = 0; n <= 4; ++n) {
      const cplx element = inner(states[n], h_psi);
      const cplx want = (m == n) ? cplx(m + 0.5, 0.0) : cplx(0.0, 0.0);
      CHECK(std::abs(element - want) < 1e-8);
    }
  }
}

TEST_CASE("custom potential x^2/2 rebuilds the QHO matrix") {
  const auto grid = GridSpec::make(32);
  const auto qho = build_hamiltonian(grid, HamiltonianKind::qho);
  const auto custom = build_hamiltonian(grid, HamiltonianKind::custom_potential,
                                        [](double x) { return 0.5 * x * x; });
  double worst = 0.0;
  for (int r = 0; r < grid.n; ++r)
    for (int c = 0; c < grid.n; ++c)
      worst = std::max(worst,
                       std::abs(qho.matrix().at(r, c) - custom.matrix().at(r, c)));
  CHECK(worst < 1e-12);
}

TEST_CASE("custom potential x^4/2 rebuilds the quartic matrix") {
  const auto grid = GridSpec::make(32);
  const auto quartic = build_hamiltonian(grid, HamiltonianKind::quartic);
  const auto custom = build_hamiltonian(
      grid, HamiltonianKind::custom_potential,
      [](double x) { return 0.5 * x * x * x * x; });
  double worst = 0.0;
  for (int r = 0; r < grid.n; ++r)
    for (int c = 0; c < grid.n; ++c)
      worst = std::max(
          worst, std::abs(quartic.matrix().at(r, c) - custom.matrix().at(r, c)));
  CHECK(worst < 1e-12);
}

TEST_CASE("built Hamiltonians are Hermitian and spectrally sane") {
  const auto grid = GridSpec::make(64);
  const auto h = build_hamiltonian(grid, HamiltonianKind::qho);
  CHECK(h.matrix().hermiticity_deviation() < 1e-12);
  const auto& eig = h.eigensystem();
  CHECK(std::abs(eig.eigenvalues[0] - 0.5) < 1e-9);
  CHECK(std::abs(eig.eigenvalues[5] - 5.5) < 1e-7);
}

TEST_CASE("apply_quadratic_phase acts pointwise for position generators") {
  const auto grid = GridSpec::make(32);
  const cvec psi = sampled_gaussian(grid);
  const double theta = 0.37;

  const cvec x2 = apply_quadratic_phase(psi, QuadraticGenerator::X2, theta, grid);
  const cvec x4 = apply_quadratic_phase(psi, QuadraticGenerator::X4, theta, grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x_at(i);
    CHECK(std::abs(x2[i] - std::polar(1.0, -theta * x * x) * psi[i]) < 1e-14);
    CHECK(std::abs(x4[i] - std::polar(1.0, -theta * x * x * x * x) * psi[i]) <
          1e-14);
  }

  const cvec p2 = apply_quadratic_phase(psi, QuadraticGenerator::P2, theta, grid);
  CHECK(std::abs(norm2(p2) - 1.0) < 1e-13);
}

TEST_CASE("cv_matrix_element reproduces hand values") {
  // <0| x^2 |0> = 1/2, <0| p^2 |0> = 1/2.
  CHECK(std::abs(cv_matrix_element(0, 2, 0, 0) - cplx(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(cv_matrix_element(2, 0, 0, 0) - cplx(0.5, 0.0)) < 1e-14);
  // <1| x |0> = sqrt(1/2), <1| p |0> = i sqrt(1/2).
  CHECK(std::abs(cv_matrix_element(0, 1, 1, 0) - cplx(std::sqrt(0.5), 0.0)) <
        1e-14);
  CHECK(std::abs(cv_matrix_element(1, 0, 1, 0) - cplx(0.0, std::sqrt(0.5))) <
        1e-14);
  // <0| p x |0> = -i/2 (the ordering carries the commutator).
  CHECK(std::abs(cv_matrix_element(1, 1, 0, 0) - cplx(0.0, -0.5)) < 1e-14);
  // Orthogonality: an even operator cannot couple opposite parities.
  CHECK(std::abs(cv_matrix_element(0, 2, 1, 0)) < 1e-14);
}

TEST_CASE("cv_matrix_element agrees with pointwise quadrature") {
  struct Probe {
    int l1, l2, m, n;
  };
  const Probe probes[] = {
      {0, 2, 0, 0}, {0, 3, 1, 2}, {0, 4, 2, 2}, {1, 1, 0, 0},
      {1, 2, 1, 2}, {2, 0, 3, 3}, {2, 2, 2, 0}, {1, 0, 1, 0},
  };
  for (const auto& probe : probes) {
    const cplx got = cv_matrix_element(probe.l1, probe.l2, probe.m, probe.n);
    const cplx want =
        quadrature_element(probe.l1, probe.l2, probe.m, probe.n);
    CHECK(std::abs(got - want) < 1e-6);
  }
}

TEST_CASE("cv_matrix_element rejects high operator degree") {
  CHECK_THROWS_AS(cv_matrix_element(5, 4, 0, 0), std::invalid_argument);
}

TEST_CASE("discrete matrix elements converge to the continuum values") {
  const auto grid = GridSpec::make(64);
  struct Probe {
    int l1, l2, m, n;
  };
  const Probe probes[] = {{0, 2, 0, 0}, {1, 1, 0, 0}, {0, 1, 1, 0},
                          {2, 0, 2, 2}, {0, 4, 3, 1}};
  for (const auto& probe : probes) {
    const cplx discrete =
        discrete_matrix_element(grid, probe.l1, probe.l2, probe.m, probe.n);
    const cplx continuum =
        cv_matrix_element(probe.l1, probe.l2, probe.m, probe.n);
    CHECK(std::abs(discrete - continuum) < 1e-9);
  }
  CHECK_THROWS_AS(discrete_matrix_element(grid, 0, 1, 40, 0),
                  std::invalid_argument);
}

TEST_CASE("overlap_matrix is close to the identity on low modes") {
  const auto grid = GridSpec::make(64);
  const auto h = build_hamiltonian(grid, HamiltonianKind::qho);
  const int max_n = 8;
  const auto overlaps = overlap_matrix(h, max_n);
  for (int m = 0; m <= max_n; ++m) {
    for (int n = 0; n <= max_n; ++n) {
      const double value = overlaps[m * (max_n + 1) + n];
      if (m == n) {
        CHECK(value > 0.9999);
        CHECK(value <= 1.0 + 1e-12);
      } else {
        CHECK(value < 1e-4);
      }
    }
  }
}
