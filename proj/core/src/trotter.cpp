#include "oscsim/trotter.hpp"

#include <cmath>
#include <string>

namespace oscsim {

namespace {

void expand(int p, double s, QuadraticGenerator base,
            std::vector<std::pair<QuadraticGenerator, double>>& out) {
  if (p == 1) {
    out.emplace_back(base, s / 4.0);
    out.emplace_back(QuadraticGenerator::P2, s / 2.0);
    out.emplace_back(base, s / 4.0);
    return;
  }
  const int q = p - 1;
  const double sq = s / (4.0 - std::pow(4.0, 1.0 / (2.0 * q + 1.0)));
  expand(q, sq, base, out);
  expand(q, sq, base, out);
  expand(q, s - 4.0 * sq, base, out);
  expand(q, sq, base, out);
  expand(q, sq, base, out);
}

long pow5(int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= 5;
  return r;
}

}  // namespace

GeneratorSchedule build_schedule(int p, double s, SplittingKind splitting) {
  if (p < 1 || p > 6) {
    throw std::invalid_argument("build_schedule: order must be in 1..6");
  }
  const QuadraticGenerator base = splitting == SplittingKind::qho
                                      ? QuadraticGenerator::X2
                                      : QuadraticGenerator::X4;
  GeneratorSchedule schedule;
  schedule.order = p;
  schedule.span = s;
  std::vector<std::pair<QuadraticGenerator, double>> raw;
  raw.reserve(3 * pow5(p - 1));
  expand(p, s, base, raw);
  schedule.raw_count = static_cast<long>(raw.size());
  // Merge adjacent factors with the same generator (they commute).
  for (const auto& step : raw) {
    if (!schedule.steps.empty() && schedule.steps.back().first == step.first) {
      schedule.steps.back().second += step.second;
    } else {
      schedule.steps.push_back(step);
    }
  }
  return schedule;
}

cvec apply_schedule(const GeneratorSchedule& schedule, const cvec& state,
                    const GridSpec& grid) {
  cvec out = state;
  // Steps list the product left-to-right; the rightmost factor acts first.
  for (auto it = schedule.steps.rbegin(); it != schedule.steps.rend(); ++it) {
    out = apply_quadratic_phase(out, it->first, it->second, grid);
  }
  return out;
}

cvec exact_propagate(const ModelHamiltonian& H, double t, const cvec& state) {
  const EigenDecomposition& eig = H.eigensystem();
  const int n = eig.dim;
  if (static_cast<int>(state.size()) != n) {
    throw std::invalid_argument("exact_propagate: dimension mismatch");
  }
  cvec modal(n, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (int r = 0; r < n; ++r) acc += std::conj(eig.vec_at(r, k)) * state[r];
    modal[k] = acc * std::polar(1.0, -eig.eigenvalues[k] * t);
  }
  cvec out(n, cplx(0.0));
  for (int r = 0; r < n; ++r) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) acc += eig.vec_at(r, k) * modal[k];
    out[r] = acc;
  }
  return out;
}

double trotter_error(const ModelHamiltonian& H, const GridSpec& grid, int p,
                     double s, int n) {
  if (n < 0 || n > grid.max_trusted_index()) {
    throw std::invalid_argument(
        "trotter_error: mode index outside the trusted low-energy range");
  }
  cvec phi;
  SplittingKind splitting;
  if (H.kind() == HamiltonianKind::qho) {
    phi = normalized(make_hermite_state(grid, n, false).amplitudes);
    splitting = SplittingKind::qho;
  } else if (H.kind() == HamiltonianKind::quartic) {
    phi = H.eigensystem().column(n);
    splitting = SplittingKind::quartic;
  } else {
    throw std::invalid_argument(
        "trotter_error: only qho and quartic Hamiltonians are supported");
  }
  const GeneratorSchedule schedule = build_schedule(p, s, splitting);
  const cvec approx = apply_schedule(schedule, phi, grid);
  const cvec exact = exact_propagate(H, s, phi);
  return dist2(approx, exact);
}

double TrotterPlan::realized_bound(int n) const {
  return static_cast<double>(k) * (n + 2.0) * std::pow(std::abs(s), 2 * p + 1);
}

TrotterPlan select_plan(int n, double t, double eps) {
  if (n < 0) throw std::invalid_argument("select_plan: n must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("select_plan: t must be > 0");
  if (!(eps > 0.0) || eps >= 1.0) {
    throw std::invalid_argument("select_plan: eps must be in (0, 1)");
  }
  const double arg = (n + 2.0) * t / eps;
  TrotterPlan plan;
  if (arg > 1.0) {
    plan.p = static_cast<int>(
        std::ceil(std::sqrt(std::log(arg) / (2.0 * std::log(5.0)))));
  }
  plan.p = std::max(plan.p, 1);
  plan.k = static_cast<long>(
      std::ceil(t * std::pow(arg, 1.0 / (2.0 * plan.p))));
  plan.k = std::max(plan.k, 1L);
  plan.s = t / static_cast<double>(plan.k);
  plan.cost = plan.k * 3 * pow5(plan.p - 1);
  return plan;
}

}  // namespace oscsim
