#include "oscsim/sp2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscsim {

namespace {

using Lane = std::vector<cplx>;

Lane lane_of(const Sp2Poly& p, cplx Sp2Vector::*member) {
  Lane lane(p.coefficients.size(), cplx(0.0));
  for (std::size_t d = 0; d < p.coefficients.size(); ++d) {
    lane[d] = p.coefficients[d].*member;
  }
  return lane;
}

// out += scale * sigma^power * lane, as polynomials in s.
void accumulate(Lane& out, const ScalarPoly& sigma, int power, double scale,
                const Lane& lane) {
  ScalarPoly factor{1.0};
  for (int q = 0; q < power; ++q) {
    ScalarPoly next(factor.size() + sigma.size() - 1, 0.0);
    for (std::size_t i = 0; i < factor.size(); ++i) {
      for (std::size_t j = 0; j < sigma.size(); ++j) {
        next[i + j] += factor[i] * sigma[j];
      }
    }
    factor = std::move(next);
  }
  for (std::size_t i = 0; i < factor.size(); ++i) {
    if (factor[i] == 0.0) continue;
    for (std::size_t j = 0; j < lane.size(); ++j) {
      out[i + j] += scale * factor[i] * lane[j];
    }
  }
}

}  // namespace

double Sp2Vector::magnitude() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

Sp2Vector operator*(cplx scale, const Sp2Vector& v) {
  return Sp2Vector{scale * v.a, scale * v.b, scale * v.c};
}

int Sp2Poly::degree() const {
  for (int d = static_cast<int>(coefficients.size()) - 1; d >= 0; --d) {
    if (!coefficients[d].is_zero()) return d;
  }
  return -1;
}

Sp2Vector Sp2Poly::at(int d) const {
  if (d < 0 || d >= static_cast<int>(coefficients.size())) return {};
  return coefficients[d];
}

void Sp2Poly::trim() {
  while (!coefficients.empty() && coefficients.back().is_zero()) {
    coefficients.pop_back();
  }
}

Sp2Poly& Sp2Poly::operator+=(const Sp2Poly& o) {
  if (o.coefficients.size() > coefficients.size()) {
    coefficients.resize(o.coefficients.size());
  }
  for (std::size_t d = 0; d < o.coefficients.size(); ++d) {
    coefficients[d] += o.coefficients[d];
  }
  return *this;
}

Sp2Poly adjoint(QuadraticGenerator gen, const ScalarPoly& sigma,
                const Sp2Poly& target) {
  if (gen != QuadraticGenerator::X2 && gen != QuadraticGenerator::P2) {
    throw std::invalid_argument("adjoint: generator must be X2 or P2");
  }
  int sigma_degree = -1;
  for (int d = static_cast<int>(sigma.size()) - 1; d >= 0; --d) {
    if (sigma[d] != 0.0) {
      sigma_degree = d;
      break;
    }
  }
  if (sigma_degree < 0) return target;  // conjugation by the identity
  const int new_degree = target.degree() + 2 * sigma_degree;
  if (new_degree > target.max_degree) {
    throw std::invalid_argument("adjoint: degree cap exceeded");
  }

  const Lane la = lane_of(target, &Sp2Vector::a);
  const Lane lb = lane_of(target, &Sp2Vector::b);
  const Lane lc = lane_of(target, &Sp2Vector::c);
  const std::size_t out_size = target.coefficients.size() + 2 * sigma_degree;
  Lane oa(out_size, cplx(0.0)), ob(out_size, cplx(0.0)),
      oc(out_size, cplx(0.0));

  if (gen == QuadraticGenerator::X2) {
    accumulate(oa, sigma, 0, 1.0, la);
    accumulate(oa, sigma, 1, 4.0, lc);
    accumulate(oa, sigma, 2, 4.0, lb);
    accumulate(ob, sigma, 0, 1.0, lb);
    accumulate(oc, sigma, 0, 1.0, lc);
    accumulate(oc, sigma, 1, 2.0, lb);
  } else {
    accumulate(oa, sigma, 0, 1.0, la);
    accumulate(ob, sigma, 0, 1.0, lb);
    accumulate(ob, sigma, 2, 4.0, la);
    accumulate(ob, sigma, 1, -4.0, lc);
    accumulate(oc, sigma, 0, 1.0, lc);
    accumulate(oc, sigma, 1, -2.0, la);
  }

  Sp2Poly out;
  out.max_degree = target.max_degree;
  out.coefficients.resize(out_size);
  for (std::size_t d = 0; d < out_size; ++d) {
    out.coefficients[d] = Sp2Vector{oa[d], ob[d], oc[d]};
  }
  out.trim();
  return out;
}

Sp2Poly defect_poly(int p, SplittingKind splitting) {
  if (p < 1 || p > 3) {
    throw std::invalid_argument("defect_poly: order must be in 1..3");
  }
  if (splitting != SplittingKind::qho) {
    throw std::invalid_argument(
        "defect_poly: only the x^2/p^2 splitting closes on sp(2)");
  }
  const GeneratorSchedule schedule = build_schedule(p, 1.0, splitting);
  const auto& steps = schedule.steps;
  const int count = static_cast<int>(steps.size());
  const int cap = static_cast<int>(2 * std::pow(5.0, p));

  Sp2Poly total;
  total.max_degree = cap;
  for (int i = 0; i < count; ++i) {
    const double gamma = steps[i].second;
    Sp2Poly term;
    term.max_degree = cap;
    Sp2Vector seed;
    if (steps[i].first == QuadraticGenerator::X2) {
      seed.a = cplx(0.0, -gamma);
    } else {
      seed.b = cplx(0.0, -gamma);
    }
    term.coefficients = {seed};
    for (int j = i + 1; j < count; ++j) {
      const ScalarPoly sigma{0.0, -steps[j].second};
      term = adjoint(steps[j].first, sigma, term);
    }
    total += term;
  }
  // The degree-0 part sums to -iH; adding iH = i/2 (x^2 + p^2) cancels it
  // up to roundoff in the recursion coefficients.
  Sp2Poly offset;
  offset.max_degree = cap;
  offset.coefficients = {Sp2Vector{cplx(0.0, 0.5), cplx(0.0, 0.5), 0.0}};
  total += offset;
  total.trim();
  return total;
}

int lowest_degree(const Sp2Poly& poly, double rel_tol) {
  double peak = 0.0;
  for (const auto& v : poly.coefficients) {
    peak = std::max(peak, v.magnitude());
  }
  if (peak == 0.0) {
    throw std::invalid_argument("lowest_degree: zero polynomial");
  }
  for (std::size_t d = 0; d < poly.coefficients.size(); ++d) {
    if (poly.coefficients[d].magnitude() > rel_tol * peak) {
      return static_cast<int>(d);
    }
  }
  throw std::invalid_argument("lowest_degree: zero polynomial");
}

Sp2Vector evaluate(const Sp2Poly& poly, double s) {
  Sp2Vector acc;
  for (int d = static_cast<int>(poly.coefficients.size()) - 1; d >= 0; --d) {
    acc = cplx(s) * acc;
    acc += poly.coefficients[d];
  }
  return acc;
}

}  // namespace oscsim
