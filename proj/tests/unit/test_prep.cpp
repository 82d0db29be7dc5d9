#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "oscsim/numerics.hpp"
#include "oscsim/oscillator.hpp"
#include "oscsim/prep.hpp"
#include "oscsim/types.hpp"

using namespace oscsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// exp(-i H t) |state> by direct Taylor summation (||H t|| small here).
cvec taylor_propagate(const HermitianMatrix& h, double t, const cvec& state) {
  cvec acc = state;
  cvec term = state;
  for (int m = 1; m <= 60; ++m) {
    cvec next(h.dim, 0.0);
    for (int r = 0; r < h.dim; ++r) {
      cplx sum = 0.0;
      for (int c = 0; c < h.dim; ++c) sum += h.at(r, c) * term[c];
      next[r] = sum * cplx(0.0, -1.0) * (t / m);
    }
    term = next;
    for (int r = 0; r < h.dim; ++r) acc[r] += term[r];
  }
  return acc;
}

}  // namespace

TEST_CASE("prep parameter formulas") {
  const auto grid = GridSpec::make(256);
  const double delta = 8.0;
  const auto params = GaussianPrepParams::compute(grid, delta);

  const double sigma_sq = kPi * delta / 256.0;
  CHECK(params.delta == delta);
  CHECK(params.sigma_sq == doctest::Approx(sigma_sq).epsilon(1e-15));
  const double t = std::sqrt(sigma_sq * (2.0 - 4.0 * sigma_sq)) / 2.0;
  CHECK(params.t == doctest::Approx(t).epsilon(1e-15));
  CHECK(params.t_prime ==
        doctest::Approx(1.0 / (4.0 * t + 4.0 * sigma_sq * sigma_sq / t))
            .epsilon(1e-15));
  CHECK(params.alpha == 0.0);
}

TEST_CASE("prep parameters reject out-of-range widths") {
  const auto grid = GridSpec::make(64);
  CHECK_THROWS_AS(GaussianPrepParams::compute(grid, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(GaussianPrepParams::compute(grid, -3.0),
                  std::invalid_argument);
  // sigma_sq = pi * 11 / 64 > 1/2.
  CHECK_THROWS_AS(GaussianPrepParams::compute(grid, 11.0),
                  std::invalid_argument);
}

TEST_CASE("gaussian_state amplitudes and norm") {
  const auto grid = GridSpec::make(64);
  const double delta = 6.0;
  const cvec state = gaussian_state(grid, delta);
  CHECK(std::abs(norm2(state) - 1.0) < 1e-14);

  const int center = grid.n / 2;  // j = 0
  for (int j : {1, 3, 7}) {
    const double want = std::exp(-j * j / (2.0 * delta));
    CHECK(std::abs(state[center + j] / state[center] - want) < 1e-13);
    CHECK(std::abs(state[center - j] / state[center] - want) < 1e-13);
  }
}

TEST_CASE("truncated_gaussian_prep zeroes the tail and renormalizes") {
  const auto grid = GridSpec::make(64);
  const double delta = 6.0;
  const double eps = 1e-3;
  const cvec full = gaussian_state(grid, delta);
  const cvec cut = truncated_gaussian_prep(grid, delta, eps);

  CHECK(std::abs(norm2(cut) - 1.0) < 1e-14);
  const int j0 = static_cast<int>(
      std::ceil(std::sqrt(2.0 * delta * std::log(1.0 / eps))));
  const int center = grid.n / 2;
  for (int i = 0; i < grid.n; ++i) {
    if (std::abs(i - center) > j0) CHECK(cut[i] == cplx(0.0, 0.0));
  }
  CHECK(dist2(full, cut) < 2.0 * eps);
  CHECK_THROWS_AS(truncated_gaussian_prep(grid, delta, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(truncated_gaussian_prep(grid, delta, 1.0),
                  std::invalid_argument);
}

TEST_CASE("prepare_ground hits the periodized ground state") {
  const auto grid = GridSpec::make(256);
  const auto result = prepare_ground(grid, 8.0);
  CHECK(result.error < 1e-10);
  CHECK(std::abs(norm2(result.state) - 1.0) < 1e-12);

  // Wider seeds are less accurate but still land close.
  const auto coarse = prepare_ground(grid, 4.0);
  CHECK(coarse.error < 1e-6);
  CHECK(coarse.error > result.error);
}

TEST_CASE("prepare_ground error definition is reproducible") {
  const auto grid = GridSpec::make(128);
  const auto result = prepare_ground(grid, 6.0);
  const cvec target =
      normalized(make_hermite_state(grid, 0, true).amplitudes);
  cvec rotated(grid.n);
  const cplx phase = std::polar(1.0, -result.params.alpha);
  for (int i = 0; i < grid.n; ++i) rotated[i] = phase * result.state[i];
  CHECK(std::abs(dist2(target, rotated) - result.error) < 1e-12);
  // alpha is chosen to make the target overlap real positive.
  const cplx overlap = inner(target, rotated);
  CHECK(overlap.real() > 0.0);
  CHECK(std::abs(overlap.imag()) < 1e-10);
}

TEST_CASE("prepare_ground needs the positive momentum chirp") {
  const auto grid = GridSpec::make(256);
  GroundPrepOptions options;
  options.flip_p2_sign = true;
  const auto flipped = prepare_ground(grid, 8.0, options);
  CHECK(flipped.error > 0.1);
}

TEST_CASE("prepare_ground honors overrides") {
  const auto grid = GridSpec::make(128);
  const auto params = GaussianPrepParams::compute(grid, 6.0);

  GroundPrepOptions same;
  same.t_override = params.t;
  same.t_prime_override = params.t_prime;
  const auto base = prepare_ground(grid, 6.0);
  const auto overridden = prepare_ground(grid, 6.0, same);
  CHECK(overridden.error == doctest::Approx(base.error).epsilon(1e-12));

  GroundPrepOptions detuned;
  detuned.t_override = 0.5 * params.t;
  const auto off = prepare_ground(grid, 6.0, detuned);
  CHECK(off.error > 10.0 * base.error);
}

TEST_CASE("ladder Hamiltonian spectrum pairs at +-sqrt(n+1)") {
  const auto grid = GridSpec::make(32);
  const auto system = jc_build(grid);
  CHECK(system.dim() == 2 * grid.n);
  CHECK(system.matrix().hermiticity_deviation() < 1e-12);

  const auto& eig = system.eigensystem();
  double closest_zero = 1e300;
  for (double lambda : eig.eigenvalues)
    closest_zero = std::min(closest_zero, std::abs(lambda));
  CHECK(closest_zero < 1e-8);

  for (int k = 1; k <= 6; ++k) {
    for (double target : {std::sqrt(double(k)), -std::sqrt(double(k))}) {
      double best = 1e300;
      for (double lambda : eig.eigenvalues)
        best = std::min(best, std::abs(lambda - target));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("jc_rung_time is a half Rabi period") {
  for (int n : {0, 1, 5}) {
    CHECK(jc_rung_time(n) ==
          doctest::Approx(kPi / (2.0 * std::sqrt(n + 1.0))).epsilon(1e-15));
  }
}

TEST_CASE("jc_exact_step phases the resonant pair by -i") {
  const auto grid = GridSpec::make(16);
  const auto system = jc_build(grid);
  const auto& eig = system.eigensystem();

  const int n = 0;
  int best = 0;
  for (int k = 1; k < system.dim(); ++k) {
    if (std::abs(eig.eigenvalues[k] - std::sqrt(n + 1.0)) <
        std::abs(eig.eigenvalues[best] - std::sqrt(n + 1.0)))
      best = k;
  }
  const cvec mode = eig.column(best);
  const cvec stepped = jc_exact_step(system, n, mode);
  // t_0 = pi/2 and the eigenvalue is +1: the phase is exp(-i pi/2).
  cvec want(system.dim());
  for (int i = 0; i < system.dim(); ++i)
    want[i] = cplx(0.0, -1.0) * mode[i];
  CHECK(dist2(stepped, want) < 1e-8);
  CHECK(std::abs(norm2(stepped) - 1.0) < 1e-12);
}

TEST_CASE("jc_split_step defect is second order in the span") {
  const auto grid = GridSpec::make(16);
  const auto system = jc_build(grid);
  const auto& eig = system.eigensystem();

  int best = 0;
  for (int k = 1; k < system.dim(); ++k) {
    if (std::abs(eig.eigenvalues[k] - 1.0) <
        std::abs(eig.eigenvalues[best] - 1.0))
      best = k;
  }
  const cvec mode = eig.column(best);

  std::vector<double> logs_s, logs_err;
  for (double s : {0.02, 0.04, 0.08}) {
    const cvec split = jc_split_step(grid, s, mode);
    const cvec exact = taylor_propagate(system.matrix(), s, mode);
    logs_s.push_back(std::log(s));
    logs_err.push_back(std::log(dist2(split, exact)));
    CHECK(std::abs(norm2(split) - 1.0) < 1e-12);
  }
  const auto fit = fit_line(logs_s, logs_err);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("ladder_prepare climbs to the first excited state") {
  const auto grid = GridSpec::make(32);
  const auto exact = ladder_prepare(grid, 1, 0.1, LadderMode::exact);
  CHECK(exact.fidelity >= 0.999);
  CHECK(std::abs(norm2(exact.state) - 1.0) < 1e-12);

  const auto split = ladder_prepare(grid, 1, 0.1, LadderMode::trotter);
  CHECK(split.fidelity >= 0.9);
}

TEST_CASE("ladder_prepare accepts a prepared seed") {
  const auto grid = GridSpec::make(64);
  LadderOptions options;
  options.start_from_prepared_gaussian = true;
  options.prep_delta = 8.0;  // sigma_sq = pi/8 < 1/2 on this grid
  const auto result =
      ladder_prepare(grid, 1, 0.1, LadderMode::exact, options);
  CHECK(result.fidelity >= 0.99);
}

TEST_CASE("ladder_prepare rejects untrusted targets") {
  const auto grid = GridSpec::make(16);
  CHECK_THROWS_AS(ladder_prepare(grid, 12, 0.1, LadderMode::exact),
                  std::invalid_argument);
}

TEST_CASE("JCSystem validates the matrix dimension") {
  const auto grid = GridSpec::make(16);
  CHECK_THROWS_AS(JCSystem(grid, HermitianMatrix::zero(10)),
                  std::invalid_argument);
}
