#include "oscsim/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace oscsim {

namespace {

// FFTW plans are cached per (length, sign). Creation is serialized (FFTW's
// planner is not thread-safe); execution via fftw_execute_dft is. Plans are
// created with FFTW_ESTIMATE | FFTW_UNALIGNED so they run on any buffer.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    cvec scratch_in(n), scratch_out(n);
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(scratch_in.data()),
        reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

cvec fft_unitary(const cvec& v, FftDirection direction) {
  if (v.empty()) throw std::invalid_argument("fft_unitary: empty input");
  const int n = static_cast<int>(v.size());
  // Forward uses the positive exponent, which is FFTW's BACKWARD kernel.
  const int sign =
      direction == FftDirection::forward ? FFTW_BACKWARD : FFTW_FORWARD;
  cvec out(n);
  if (n == 1) {
    out[0] = v[0];
    return out;
  }
  fftw_plan plan = PlanCache::instance().get(n, sign);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(v.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& z : out) z *= scale;
  return out;
}

cvec centered_dft_apply(const cvec& v, FftDirection direction) {
  const int n = static_cast<int>(v.size());
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument(
        "centered_dft_apply: length must be even and >= 4, got " +
        std::to_string(n));
  }
  const int half = n / 2;
  // Move the j = -N/2 .. N/2-1 layout onto 0 .. N-1, transform, move back.
  cvec shifted(n);
  for (int i = 0; i < n; ++i) shifted[i] = v[(i + half) % n];
  // The centered-forward kernel exp(-2*pi*i*j*k/N) is the plain transform's
  // negative-exponent (inverse) kernel.
  const FftDirection inner = direction == FftDirection::forward
                                 ? FftDirection::inverse
                                 : FftDirection::forward;
  cvec f = fft_unitary(shifted, inner);
  cvec out(n);
  for (int i = 0; i < n; ++i) out[(i + half) % n] = f[i];
  return out;
}

namespace {

// Reduces Hermitian A (row-major, overwritten) to real symmetric tridiagonal
// (d, e) by Householder reflectors, accumulating the unitary Q such that
// Q^dagger A Q = T. e[i] couples indices i and i+1 and ends real >= 0.
void tridiagonalize(int n, cvec& a, cvec& q, std::vector<double>& d,
                    std::vector<double>& e) {
  auto A = [&](int r, int c) -> cplx& { return a[static_cast<size_t>(r) * n + c]; };
  auto Q = [&](int r, int c) -> cplx& { return q[static_cast<size_t>(r) * n + c]; };

  // Q starts as the identity.
  std::fill(q.begin(), q.end(), cplx(0.0));
  for (int i = 0; i < n; ++i) Q(i, i) = 1.0;

  cvec v(n), w(n), x(n);
  for (int k = 0; k + 2 < n; ++k) {
    const int lo = k + 1;
    cplx alpha = A(lo, k);
    double rest = 0.0;
    for (int i = lo + 1; i < n; ++i) rest += std::norm(A(i, k));
    if (rest == 0.0 && alpha.imag() == 0.0) continue;  // column already real tridiagonal

    const double colnorm = std::sqrt(std::norm(alpha) + rest);
    const double beta = alpha.real() >= 0.0 ? -colnorm : colnorm;
    const cplx tau = (beta - alpha) / beta;
    const cplx scale = 1.0 / (alpha - beta);

    std::fill(v.begin(), v.end(), cplx(0.0));
    v[lo] = 1.0;
    for (int i = lo + 1; i < n; ++i) v[i] = A(i, k) * scale;

    // Hermitian rank-2 update of the trailing block:
    //   x = tau * A * v;  x -= (tau * (x^dag v) / 2) * v;
    //   A -= v x^dag + x v^dag.
    for (int i = lo; i < n; ++i) {
      cplx acc = 0.0;
      for (int j = lo; j < n; ++j) acc += A(i, j) * v[j];
      w[i] = acc;
    }
    cplx xv = 0.0;
    for (int i = lo; i < n; ++i) {
      x[i] = tau * w[i];
      xv += std::conj(x[i]) * v[i];
    }
    const cplx corr = tau * xv * 0.5;
    for (int i = lo; i < n; ++i) x[i] -= corr * v[i];
    for (int i = lo; i < n; ++i) {
      for (int j = lo; j < n; ++j) {
        A(i, j) -= v[i] * std::conj(x[j]) + x[i] * std::conj(v[j]);
      }
    }

    A(lo, k) = beta;
    A(k, lo) = beta;
    for (int i = lo + 1; i < n; ++i) {
      A(i, k) = 0.0;
      A(k, i) = 0.0;
    }

    // Q <- Q (I - tau v v^dag); v vanishes above index lo.
    for (int r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (int i = lo; i < n; ++i) s += Q(r, i) * v[i];
      s *= tau;
      for (int i = lo; i < n; ++i) Q(r, i) -= s * std::conj(v[i]);
    }
  }

  // Absorb residual subdiagonal phases into a diagonal unitary D (applied to
  // Q's columns) so the tridiagonal (d, e) is real with e >= 0. With
  // c_{i+1} = phase(A[i+1][i] * c_i) the transformed subdiagonal
  // conj(c_{i+1}) * A[i+1][i] * c_i equals |A[i+1][i]|.
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  d[0] = A(0, 0).real();
  cplx c_prev = 1.0;  // c_0
  for (int i = 0; i + 1 < n; ++i) {
    const cplx eff = A(i + 1, i) * c_prev;
    const double mag = std::abs(eff);
    const cplx c_next = mag > 0.0 ? eff / mag : c_prev;
    e[i] = mag;
    d[i + 1] = A(i + 1, i + 1).real();
    if (c_next != cplx(1.0)) {
      for (int r = 0; r < n; ++r) Q(r, i + 1) *= c_next;
    }
    c_prev = c_next;
  }
}

// Implicit-shift QL on the real tridiagonal (d, e), rotating the complex
// columns of q along. Ported from the classic EISPACK routine; the sweep cap
// is 50 per eigenvalue.
void ql_implicit(int n, std::vector<double>& d, std::vector<double>& e,
                 cvec& q) {
  auto Q = [&](int r, int c) -> cplx& { return q[static_cast<size_t>(r) * n + c]; };
  if (n == 1) return;
  e[n - 1] = 0.0;  // sentinel
  double f = 0.0;
  double tst1 = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n - 1) {
      const double tst2 = tst1 + std::abs(e[m]);
      if (tst2 == tst1) break;
      ++m;
    }
    if (m != l) {
      do {
        if (iter == 50) {
          throw numerical_error(
              "eigh: QL failed to converge within 50 sweeps at index " +
              std::to_string(l));
        }
        ++iter;
        // Shift from the leading 2x2.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        d[l] = e[l] / (p + std::copysign(r, p));
        d[l + 1] = e[l] * (p + std::copysign(r, p));
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        // QL sweep from m-1 down to l.
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            const cplx hk = Q(k, i + 1);
            Q(k, i + 1) = s * Q(k, i) + c * hk;
            Q(k, i) = c * Q(k, i) - s * hk;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (tst1 + std::abs(e[l]) > tst1);
    }
    d[l] += f;
  }
}

// Single residual-correction pass on the sorted eigensystem. Accumulating the
// QL rotations leaves each column contaminated at roughly sweeps * eps * |A|;
// with R = A V - V diag(lambda) and C = V^dag R, adding V * W for
// W_mj = C_mj / (lambda_j - lambda_m) cancels that contamination to first
// order. Pairs closer than 1e-8 of the spectral spread are skipped (mixing
// inside a near-degenerate subspace is invisible to the residual). Columns
// are then re-orthonormalized and eigenvalues tightened to Rayleigh
// quotients, which keeps exp(-iHt) references accurate enough to observe
// defects near 1e-12 on states drawn from the decomposition.
void polish_eigenvectors(int n, const cvec& a, std::vector<double>& lambda,
                         cvec& vecs) {
  if (n < 2) return;
  const size_t nn = static_cast<size_t>(n);

  // R = A V - V diag(lambda).
  cvec r(nn * nn, cplx(0.0));
  for (int i = 0; i < n; ++i) {
    cplx* rrow = &r[static_cast<size_t>(i) * n];
    for (int k = 0; k < n; ++k) {
      const cplx aik = a[static_cast<size_t>(i) * n + k];
      if (aik == cplx(0.0)) continue;
      const cplx* vrow = &vecs[static_cast<size_t>(k) * n];
      for (int j = 0; j < n; ++j) rrow[j] += aik * vrow[j];
    }
    const cplx* vrow = &vecs[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) rrow[j] -= vrow[j] * lambda[j];
  }

  // W = V^dag R, scaled entrywise into correction coefficients.
  cvec w(nn * nn, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    const cplx* vrow = &vecs[static_cast<size_t>(k) * n];
    const cplx* rrow = &r[static_cast<size_t>(k) * n];
    for (int m = 0; m < n; ++m) {
      const cplx c = std::conj(vrow[m]);
      if (c == cplx(0.0)) continue;
      cplx* wrow = &w[static_cast<size_t>(m) * n];
      for (int j = 0; j < n; ++j) wrow[j] += c * rrow[j];
    }
  }
  const double gap_floor =
      1e-8 * std::max(lambda[n - 1] - lambda[0], 1e-300);
  for (int m = 0; m < n; ++m) {
    cplx* wrow = &w[static_cast<size_t>(m) * n];
    for (int j = 0; j < n; ++j) {
      const double gap = lambda[j] - lambda[m];
      wrow[j] = (m == j || std::abs(gap) <= gap_floor) ? cplx(0.0)
                                                       : wrow[j] / gap;
    }
  }

  // V += V W, reusing r as the product buffer.
  std::fill(r.begin(), r.end(), cplx(0.0));
  for (int i = 0; i < n; ++i) {
    const cplx* vrow = &vecs[static_cast<size_t>(i) * n];
    cplx* prow = &r[static_cast<size_t>(i) * n];
    for (int m = 0; m < n; ++m) {
      const cplx vim = vrow[m];
      if (vim == cplx(0.0)) continue;
      const cplx* wrow = &w[static_cast<size_t>(m) * n];
      for (int j = 0; j < n; ++j) prow[j] += vim * wrow[j];
    }
  }
  for (size_t idx = 0; idx < nn * nn; ++idx) vecs[idx] += r[idx];

  // Modified Gram-Schmidt over columns, ascending order, in a column-major
  // scratch for contiguous access.
  cvec cols(nn * nn);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cols[static_cast<size_t>(j) * n + i] =
          vecs[static_cast<size_t>(i) * n + j];
    }
  }
  for (int j = 0; j < n; ++j) {
    cplx* cj = &cols[static_cast<size_t>(j) * n];
    for (int m = 0; m < j; ++m) {
      const cplx* cm = &cols[static_cast<size_t>(m) * n];
      cplx proj = 0.0;
      for (int i = 0; i < n; ++i) proj += std::conj(cm[i]) * cj[i];
      for (int i = 0; i < n; ++i) cj[i] -= proj * cm[i];
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += std::norm(cj[i]);
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      const double inv = 1.0 / norm;
      for (int i = 0; i < n; ++i) cj[i] *= inv;
    }
  }

  // Rayleigh quotients, then restore ascending order (updates are tiny but
  // may swap near-ties).
  for (int j = 0; j < n; ++j) {
    const cplx* cj = &cols[static_cast<size_t>(j) * n];
    double rq = 0.0;
    for (int i = 0; i < n; ++i) {
      const cplx* arow = &a[static_cast<size_t>(i) * n];
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k) acc += arow[k] * cj[k];
      rq += (std::conj(cj[i]) * acc).real();
    }
    lambda[j] = rq;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return lambda[i] < lambda[j]; });
  std::vector<double> sorted_lambda(n);
  for (int c = 0; c < n; ++c) sorted_lambda[c] = lambda[order[c]];
  lambda = std::move(sorted_lambda);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      vecs[static_cast<size_t>(i) * n + c] =
          cols[static_cast<size_t>(order[c]) * n + i];
    }
  }
}

}  // namespace

EigenDecomposition eigh(const HermitianMatrix& H) {
  const int n = H.dim;
  if (n < 1 || H.entries.size() != static_cast<size_t>(n) * n) {
    throw std::invalid_argument("eigh: malformed matrix");
  }
  const double dev = H.hermiticity_deviation();
  if (dev > 1e-12) {
    throw std::invalid_argument("eigh: input is not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }

  cvec a = H.entries;
  // Exact symmetrization so roundoff in the input cannot bias the reduction.
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      const cplx avg =
          0.5 * (a[static_cast<size_t>(r) * n + c] +
                 std::conj(a[static_cast<size_t>(c) * n + r]));
      a[static_cast<size_t>(r) * n + c] = avg;
      a[static_cast<size_t>(c) * n + r] = std::conj(avg);
    }
  }

  EigenDecomposition out;
  out.dim = n;
  out.vectors.assign(static_cast<size_t>(n) * n, cplx(0.0));
  const cvec a0 = a;  // tridiagonalize overwrites a; polish needs the input
  std::vector<double> d, e;
  tridiagonalize(n, a, out.vectors, d, e);
  ql_implicit(n, d, e, out.vectors);
  cvec().swap(a);

  // Sort ascending, permuting columns along.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return d[i] < d[j]; });
  out.eigenvalues.resize(n);
  cvec sorted(static_cast<size_t>(n) * n);
  for (int c = 0; c < n; ++c) {
    out.eigenvalues[c] = d[order[c]];
    for (int r = 0; r < n; ++r) {
      sorted[static_cast<size_t>(r) * n + c] =
          out.vectors[static_cast<size_t>(r) * n + order[c]];
    }
  }
  out.vectors = std::move(sorted);

  polish_eigenvectors(n, a0, out.eigenvalues, out.vectors);

  // Deterministic phase: rotate each column so its largest-magnitude entry
  // (first index on ties) is real positive.
  for (int c = 0; c < n; ++c) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < n; ++r) {
      const double m = std::abs(out.vectors[static_cast<size_t>(r) * n + c]);
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    const cplx top = out.vectors[static_cast<size_t>(arg) * n + c];
    if (std::abs(top) > 0.0) {
      const cplx phase = std::conj(top) / std::abs(top);
      for (int r = 0; r < n; ++r) {
        out.vectors[static_cast<size_t>(r) * n + c] *= phase;
      }
    }
  }
  return out;
}

FitResult fit_line(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("fit_line: length mismatch");
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_line: need at least 3 points");
  }
  const size_t n = xs.size();
  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_line: degenerate abscissa (all xs equal)");
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return fit;
}

double norm2(const cvec& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

cplx inner(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
  cplx acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double dist2(const cvec& a, const cvec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dist2: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

cvec normalized(const cvec& v) {
  const double nrm = norm2(v);
  if (nrm == 0.0) throw std::invalid_argument("normalized: zero vector");
  cvec out = v;
  for (auto& z : out) z /= nrm;
  return out;
}

// --- type methods ---

HermitianMatrix HermitianMatrix::zero(int n) {
  if (n < 1) throw std::invalid_argument("HermitianMatrix: dim must be >= 1");
  HermitianMatrix m;
  m.dim = n;
  m.entries.assign(static_cast<size_t>(n) * n, cplx(0.0));
  return m;
}

double HermitianMatrix::max_abs() const {
  double best = 0.0;
  for (const auto& z : entries) best = std::max(best, std::abs(z));
  return best;
}

double HermitianMatrix::hermiticity_deviation() const {
  double worst = 0.0;
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
    }
  }
  return worst;
}

void HermitianMatrix::symmetrize() {
  for (int r = 0; r < dim; ++r) {
    for (int c = r; c < dim; ++c) {
      const cplx avg = 0.5 * (at(r, c) + std::conj(at(c, r)));
      at(r, c) = avg;
      at(c, r) = std::conj(avg);
    }
  }
}

cvec EigenDecomposition::column(int col) const {
  cvec out(dim);
  for (int r = 0; r < dim; ++r) out[r] = vec_at(r, col);
  return out;
}

GridSpec GridSpec::make(int n, double low_energy_fraction) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("GridSpec: dimension must be even and >= 4");
  }
  if (!(low_energy_fraction > 0.0) || low_energy_fraction > 1.0) {
    throw std::invalid_argument("GridSpec: low_energy_fraction must be in (0, 1]");
  }
  GridSpec g;
  g.n = n;
  g.spacing = std::sqrt(2.0 * std::numbers::pi / n);
  g.low_energy_fraction = low_energy_fraction;
  return g;
}

}  // namespace oscsim
