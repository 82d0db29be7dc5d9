#include "oscsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oscsim {

std::string fmt_g17(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

CsvDoc::CsvDoc(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) {
    throw std::invalid_argument("CsvDoc: at least one column required");
  }
}

void CsvDoc::add_meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void CsvDoc::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("CsvDoc: cell count does not match header");
  }
  rows_.push_back(std::move(cells));
}

void CsvDoc::add_footer(std::string line) {
  footers_.push_back(std::move(line));
}

std::string CsvDoc::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : meta_) {
    out << "# " << key << "=" << value << "\n";
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) out << ",";
    out << columns_[i];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ",";
      out << row[i];
    }
    out << "\n";
  }
  for (const auto& line : footers_) {
    out << "# " << line << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw numerical_error("write_text_file: cannot open " + path);
  }
  out << text;
  out.flush();
  if (!out) {
    throw numerical_error("write_text_file: write failed for " + path);
  }
}

FitResult fit_samples(FitModel model, const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("fit_samples: size mismatch");
  }
  std::vector<double> fx;
  std::vector<double> fy;
  fx.reserve(xs.size());
  fy.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) {
      throw std::invalid_argument("fit_samples: y values must be positive");
    }
    if (model == FitModel::powerlaw && !(xs[i] > 0.0)) {
      throw std::invalid_argument(
          "fit_samples: x values must be positive for a power law");
    }
    fx.push_back(model == FitModel::powerlaw ? std::log(xs[i]) : xs[i]);
    fy.push_back(std::log(ys[i]));
  }
  return fit_line(fx, fy);
}

std::string fit_footer(const FitResult& fit) {
  return "fit slope=" + fmt_g17(fit.slope) +
         " intercept=" + fmt_g17(fit.intercept) + " r2=" + fmt_g17(fit.r_squared);
}

int contiguous_threshold(const std::vector<double>& deviations, double eps) {
  int last = -1;
  for (std::size_t n = 0; n < deviations.size(); ++n) {
    if (!(deviations[n] <= eps)) break;
    last = static_cast<int>(n);
  }
  return last;
}

namespace {

// Coefficient vectors of the first count eigenvectors over the periodized
// Hermite basis, phase-fixed on the largest coefficient.
std::vector<cvec> hermite_profiles(const ModelHamiltonian& H, int count,
                                   int coeff_count) {
  const GridSpec& grid = H.grid();
  std::vector<cvec> basis;
  basis.reserve(coeff_count);
  for (int m = 0; m < coeff_count; ++m) {
    basis.push_back(
        normalized(make_hermite_state(grid, m, true).amplitudes));
  }
  const EigenDecomposition& eig = H.eigensystem();
  std::vector<cvec> profiles;
  profiles.reserve(count);
  for (int n = 0; n < count; ++n) {
    const cvec mode = eig.column(n);
    cvec profile(coeff_count);
    for (int m = 0; m < coeff_count; ++m) {
      profile[m] = inner(basis[m], mode);
    }
    int peak = 0;
    for (int m = 1; m < coeff_count; ++m) {
      if (std::abs(profile[m]) > std::abs(profile[peak])) peak = m;
    }
    if (std::abs(profile[peak]) > 0.0) {
      const cplx rot = std::conj(profile[peak]) / std::abs(profile[peak]);
      for (auto& entry : profile) entry *= rot;
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

}  // namespace

QuarticDeviations quartic_deviations(const ModelHamiltonian& work,
                                     const ModelHamiltonian& reference,
                                     int count, int coeff_count) {
  if (count < 1) {
    throw std::invalid_argument("quartic_deviations: count must be >= 1");
  }
  const int trusted = std::min(work.grid().max_trusted_index(),
                               reference.grid().max_trusted_index());
  if (count - 1 > trusted) {
    throw std::invalid_argument(
        "quartic_deviations: count exceeds the trusted low-energy range");
  }
  QuarticDeviations dev;
  dev.eigenvalue.reserve(count);
  dev.eigenvector.reserve(count);
  for (int n = 0; n < count; ++n) {
    dev.eigenvalue.push_back(std::abs(work.eigensystem().eigenvalues[n] -
                                      reference.eigensystem().eigenvalues[n]));
  }
  const std::vector<cvec> wp = hermite_profiles(work, count, coeff_count);
  const std::vector<cvec> rp = hermite_profiles(reference, count, coeff_count);
  for (int n = 0; n < count; ++n) {
    dev.eigenvector.push_back(dist2(wp[n], rp[n]));
  }
  return dev;
}

double plan_error(const ModelHamiltonian& H, const TrotterPlan& plan, int n) {
  const GridSpec& grid = H.grid();
  if (n < 0 || n > grid.max_trusted_index()) {
    throw std::invalid_argument(
        "plan_error: mode index outside the trusted low-energy range");
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
        "plan_error: only qho and quartic Hamiltonians are supported");
  }
  const GeneratorSchedule schedule = build_schedule(plan.p, plan.s, splitting);
  cvec approx = phi;
  for (long step = 0; step < plan.k; ++step) {
    approx = apply_schedule(schedule, approx, grid);
  }
  const double t = plan.s * static_cast<double>(plan.k);
  const cvec exact = exact_propagate(H, t, phi);
  return dist2(approx, exact);
}

}  // namespace oscsim
