#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oscsim/experiment.hpp"
#include "oscsim/numerics.hpp"
#include "oscsim/oscillator.hpp"
#include "oscsim/prep.hpp"
#include "oscsim/scattering.hpp"
#include "oscsim/sp2.hpp"
#include "oscsim/trotter.hpp"
#include "oscsim/types.hpp"

namespace {

using namespace oscsim;

// Raised for option/validation problems; mapped to exit code 1. Core
// exceptions escaping a run map to exit code 2.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_int(long v) { return std::to_string(v); }

std::string resolve_out(const std::string& flag_value,
                        const std::string& subcommand) {
  if (!flag_value.empty()) return flag_value;
  const char* dir = std::getenv("OSCSIM_OUT_DIR");
  const std::string base = (dir != nullptr && *dir != '\0') ? dir : ".";
  return base + "/" + subcommand + ".csv";
}

void emit(const std::string& path, const CsvDoc& doc) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  write_text_file(path, doc.serialize());
  std::cout << "wrote " << path << " (" << doc.row_count() << " rows)\n";
}

template <typename Fn>
auto with_record(const std::string& label, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw numerical_error("record " + label + ": " + e.what());
  }
}

template <typename T>
void sort_unique(std::vector<T>& values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

HamiltonianKind parse_kind(const std::string& kind) {
  if (kind == "qho") return HamiltonianKind::qho;
  if (kind == "quartic") return HamiltonianKind::quartic;
  throw usage_error("unknown hamiltonian kind: " + kind);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumOpts {
  std::vector<int> n_grid{400};
  std::string kind = "qho";
  int max_n = -1;
  int ref_n = 0;  // quartic only; 0 = largest grid in n_grid
  std::string out;
  int jobs = default_jobs();
};

void run_spectrum(SpectrumOpts opts) {
  sort_unique(opts.n_grid);
  if (opts.n_grid.empty()) throw usage_error("spectrum: empty --n-grid");
  const HamiltonianKind kind = parse_kind(opts.kind);
  const bool quartic = kind == HamiltonianKind::quartic;
  const int ref_n = quartic ? (opts.ref_n > 0 ? opts.ref_n : opts.n_grid.back())
                            : 0;

  std::optional<ModelHamiltonian> ref;
  if (quartic) {
    ref.emplace(with_record("ref N=" + fmt_int(ref_n), [&] {
      ModelHamiltonian H = build_hamiltonian(GridSpec::make(ref_n), kind);
      H.eigensystem();
      return H;
    }));
  }

  struct Block {
    int n_size = 0;
    std::vector<double> energies;
    std::vector<double> refs;
  };
  const auto blocks = parallel_map(
      static_cast<int>(opts.n_grid.size()), opts.jobs, [&](int idx) {
        const int n_size = opts.n_grid[idx];
        return with_record("N=" + fmt_int(n_size), [&] {
          const GridSpec grid = GridSpec::make(n_size);
          const ModelHamiltonian H =
              quartic && n_size == ref_n ? *ref : build_hamiltonian(grid, kind);
          int count = grid.max_trusted_index();
          if (opts.max_n >= 0) count = std::min(count, opts.max_n);
          if (quartic) count = std::min(count, ref->grid().max_trusted_index());
          Block block;
          block.n_size = n_size;
          for (int n = 0; n <= count; ++n) {
            block.energies.push_back(H.eigensystem().eigenvalues[n]);
            block.refs.push_back(quartic ? ref->eigensystem().eigenvalues[n]
                                         : n + 0.5);
          }
          return block;
        });
      });

  CsvDoc doc({"N", "n", "E_n", "ref"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "spectrum");
  doc.add_meta("kind", opts.kind);
  if (quartic) doc.add_meta("ref_n", fmt_int(ref_n));
  doc.add_meta("max_n", fmt_int(opts.max_n));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  for (const auto& block : blocks) {
    for (std::size_t n = 0; n < block.energies.size(); ++n) {
      doc.add_row({fmt_int(block.n_size), fmt_int(static_cast<long>(n)),
                   fmt_g17(block.energies[n]), fmt_g17(block.refs[n])});
    }
  }
  emit(resolve_out(opts.out, "spectrum"), doc);
}

// ----------------------------------------------------------- overlap-matrix

struct OverlapOpts {
  int n = 128;
  std::string kind = "qho";
  int max_n = -1;
  std::string out;
};

void run_overlap(const OverlapOpts& opts) {
  const GridSpec grid = GridSpec::make(opts.n);
  const int count =
      opts.max_n >= 0 ? std::min(opts.max_n, grid.max_trusted_index())
                      : grid.max_trusted_index();
  const ModelHamiltonian H = build_hamiltonian(grid, parse_kind(opts.kind));
  const std::vector<double> overlaps = overlap_matrix(H, count);

  CsvDoc doc({"m", "n", "abs_overlap"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "overlap-matrix");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("kind", opts.kind);
  doc.add_meta("max_n", fmt_int(count));
  const int side = count + 1;
  for (int m = 0; m < side; ++m) {
    for (int n = 0; n < side; ++n) {
      doc.add_row({fmt_int(m), fmt_int(n), fmt_g17(overlaps[m * side + n])});
    }
  }
  emit(resolve_out(opts.out, "overlap-matrix"), doc);
}

// ----------------------------------------------------------- eig-error-scan

struct EigErrorOpts {
  std::vector<int> n_grid{32, 48, 64, 80, 96};
  double ratio = 0.5;
  std::string out;
  int jobs = default_jobs();
};

void run_eig_error(EigErrorOpts opts) {
  sort_unique(opts.n_grid);
  if (opts.n_grid.size() < 3) {
    throw usage_error("eig-error-scan: need at least 3 grid sizes for a fit");
  }
  if (!(opts.ratio > 0.0) || opts.ratio > 0.5) {
    throw usage_error("eig-error-scan: --ratio must be in (0, 0.5]");
  }

  struct Row {
    int n_size = 0;
    int mode = 0;
    double err = 0.0;
  };
  const auto rows = parallel_map(
      static_cast<int>(opts.n_grid.size()), opts.jobs, [&](int idx) {
        const int n_size = opts.n_grid[idx];
        return with_record("N=" + fmt_int(n_size), [&] {
          const GridSpec grid = GridSpec::make(n_size);
          const ModelHamiltonian H =
              build_hamiltonian(grid, HamiltonianKind::qho);
          const int mode = std::min(static_cast<int>(opts.ratio * n_size),
                                    grid.max_trusted_index());
          const double err =
              std::abs(H.eigensystem().eigenvalues[mode] - (mode + 0.5));
          if (!(err > 0.0)) {
            throw numerical_error("eigenvalue error vanished; nothing to fit");
          }
          return Row{n_size, mode, err};
        });
      });

  CsvDoc doc({"N", "n", "log_abs_err"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "eig-error-scan");
  doc.add_meta("ratio", fmt_g17(opts.ratio));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    doc.add_row({fmt_int(row.n_size), fmt_int(row.mode),
                 fmt_g17(std::log(row.err))});
    xs.push_back(row.n_size);
    ys.push_back(row.err);
  }
  doc.add_footer(fit_footer(fit_samples(FitModel::loglinear, xs, ys)));
  emit(resolve_out(opts.out, "eig-error-scan"), doc);
}

// ---------------------------------------------------------- trotter-error-n

struct TrotterErrorOpts {
  int n = 200;
  std::string kind = "qho";
  int p = 4;
  double s = 1.0;
  int n_min = 4;
  int n_max = 50;
  std::string out;
  int jobs = default_jobs();
};

void run_trotter_error(const TrotterErrorOpts& opts) {
  if (opts.n_min < 1) {
    throw usage_error("trotter-error-n: --n-min must be >= 1 (power-law fit)");
  }
  if (opts.n_max - opts.n_min + 1 < 3) {
    throw usage_error("trotter-error-n: need at least 3 modes for a fit");
  }
  const GridSpec grid = GridSpec::make(opts.n);
  if (opts.n_max > grid.max_trusted_index()) {
    throw usage_error("trotter-error-n: --n-max exceeds the trusted range");
  }
  const ModelHamiltonian H = build_hamiltonian(grid, parse_kind(opts.kind));
  H.eigensystem();  // build once before the parallel scan

  const int count = opts.n_max - opts.n_min + 1;
  const auto errs = parallel_map(count, opts.jobs, [&](int idx) {
    const int mode = opts.n_min + idx;
    return with_record("n=" + fmt_int(mode), [&] {
      return trotter_error(H, grid, opts.p, opts.s, mode);
    });
  });

  CsvDoc doc({"n", "err"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "trotter-error-n");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("kind", opts.kind);
  doc.add_meta("p", fmt_int(opts.p));
  doc.add_meta("s", fmt_g17(opts.s));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  std::vector<double> xs, ys;
  for (int idx = 0; idx < count; ++idx) {
    doc.add_row({fmt_int(opts.n_min + idx), fmt_g17(errs[idx])});
    xs.push_back(opts.n_min + idx);
    ys.push_back(errs[idx]);
  }
  doc.add_footer(fit_footer(fit_samples(FitModel::powerlaw, xs, ys)));
  emit(resolve_out(opts.out, "trotter-error-n"), doc);
}

// --------------------------------------------------------- trotter-converge

struct ConvergeOpts {
  std::vector<int> n_grid{64, 128, 256, 512};
  double t = std::numbers::pi / 2.0;
  double eps = 1e-3;
  std::string out;
  int jobs = default_jobs();
};

void run_converge(ConvergeOpts opts) {
  sort_unique(opts.n_grid);
  if (opts.n_grid.empty()) throw usage_error("trotter-converge: empty grid");

  struct Row {
    int n_size = 0;
    TrotterPlan plan;
    long merged = 0;
    double err = 0.0;
  };
  const auto rows = parallel_map(
      static_cast<int>(opts.n_grid.size()), opts.jobs, [&](int idx) {
        const int n_size = opts.n_grid[idx];
        return with_record("N=" + fmt_int(n_size), [&] {
          const GridSpec grid = GridSpec::make(n_size);
          const ModelHamiltonian H =
              build_hamiltonian(grid, HamiltonianKind::qho);
          const int mode = grid.max_trusted_index();
          const TrotterPlan plan = select_plan(mode, opts.t, opts.eps);
          Row row;
          row.n_size = n_size;
          row.plan = plan;
          row.merged =
              build_schedule(plan.p, plan.s, SplittingKind::qho).merged_count() *
              plan.k;
          row.err = plan_error(H, plan, mode);
          return row;
        });
      });

  CsvDoc doc({"N", "p", "k", "err"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "trotter-converge");
  doc.add_meta("t", fmt_g17(opts.t));
  doc.add_meta("eps", fmt_g17(opts.eps));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  for (const auto& row : rows) {
    doc.add_row({fmt_int(row.n_size), fmt_int(row.plan.p), fmt_int(row.plan.k),
                 fmt_g17(row.err)});
  }
  for (const auto& row : rows) {
    doc.add_footer("plan N=" + fmt_int(row.n_size) + " p=" +
                   fmt_int(row.plan.p) + " k=" + fmt_int(row.plan.k) +
                   " cost=" + fmt_int(row.plan.cost) + " merged=" +
                   fmt_int(row.merged) + " realized_bound=" +
                   fmt_g17(row.plan.realized_bound(row.n_size / 2)));
  }
  emit(resolve_out(opts.out, "trotter-converge"), doc);
}

// --------------------------------------------------------------- prep-ground

struct PrepOpts {
  int n = 512;
  std::vector<double> delta_grid{4, 8, 12, 16, 20};
  bool flip_p2_sign = false;
  std::string out;
  int jobs = default_jobs();
};

void run_prep(PrepOpts opts) {
  sort_unique(opts.delta_grid);
  if (opts.delta_grid.size() < 3) {
    throw usage_error("prep-ground: need at least 3 delta values for a fit");
  }
  const GridSpec grid = GridSpec::make(opts.n);
  GroundPrepOptions ground;
  ground.flip_p2_sign = opts.flip_p2_sign;

  const auto errs = parallel_map(
      static_cast<int>(opts.delta_grid.size()), opts.jobs, [&](int idx) {
        const double delta = opts.delta_grid[idx];
        return with_record("delta=" + fmt_g17(delta), [&] {
          return prepare_ground(grid, delta, ground).error;
        });
      });

  CsvDoc doc({"delta", "err"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "prep-ground");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("flip_p2_sign", opts.flip_p2_sign ? "1" : "0");
  doc.add_meta("jobs", fmt_int(opts.jobs));
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < opts.delta_grid.size(); ++i) {
    doc.add_row({fmt_g17(opts.delta_grid[i]), fmt_g17(errs[i])});
    xs.push_back(opts.delta_grid[i]);
    ys.push_back(errs[i]);
  }
  doc.add_footer(fit_footer(fit_samples(FitModel::loglinear, xs, ys)));
  emit(resolve_out(opts.out, "prep-ground"), doc);
}

// ----------------------------------------------------------------- jc-ladder

struct LadderOpts {
  int n = 64;
  std::vector<int> targets{1, 2, 3};
  std::string mode = "both";
  double eps = 0.05;
  double c = 4.0;
  bool start_gaussian = false;
  double prep_delta = 8.0;
  std::string out;
  int jobs = default_jobs();
};

void run_ladder(LadderOpts opts) {
  sort_unique(opts.targets);
  if (opts.targets.empty()) throw usage_error("jc-ladder: empty --targets");
  std::vector<std::string> modes;
  if (opts.mode == "both") {
    modes = {"exact", "trotter"};
  } else if (opts.mode == "exact" || opts.mode == "trotter") {
    modes = {opts.mode};
  } else {
    throw usage_error("jc-ladder: --mode must be exact, trotter, or both");
  }
  const GridSpec grid = GridSpec::make(opts.n);
  LadderOptions ladder;
  ladder.trotter_c = opts.c;
  ladder.start_from_prepared_gaussian = opts.start_gaussian;
  ladder.prep_delta = opts.prep_delta;

  struct Row {
    int target = 0;
    std::string mode;
    long m = 0;
    double fidelity = 0.0;
  };
  std::vector<std::pair<int, std::string>> cases;
  for (int target : opts.targets) {
    for (const auto& mode : modes) cases.emplace_back(target, mode);
  }
  const auto rows = parallel_map(
      static_cast<int>(cases.size()), opts.jobs, [&](int idx) {
        const auto& [target, mode_name] = cases[idx];
        return with_record(
            "n_target=" + fmt_int(target) + " mode=" + mode_name, [&] {
              const LadderMode mode = mode_name == "exact"
                                          ? LadderMode::exact
                                          : LadderMode::trotter;
              const LadderResult result =
                  ladder_prepare(grid, target, opts.eps, mode, ladder);
              const long m =
                  mode == LadderMode::trotter
                      ? static_cast<long>(std::ceil(opts.c * target / opts.eps))
                      : 0;
              return Row{target, mode_name, m, result.fidelity};
            });
      });

  CsvDoc doc({"n_target", "mode", "m", "fidelity"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "jc-ladder");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("mode", opts.mode);
  doc.add_meta("eps", fmt_g17(opts.eps));
  doc.add_meta("c", fmt_g17(opts.c));
  doc.add_meta("start_gaussian", opts.start_gaussian ? "1" : "0");
  doc.add_meta("prep_delta", fmt_g17(opts.prep_delta));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  for (const auto& row : rows) {
    doc.add_row({fmt_int(row.target), row.mode, fmt_int(row.m),
                 fmt_g17(row.fidelity)});
  }
  emit(resolve_out(opts.out, "jc-ladder"), doc);
}

// -------------------------------------------------------------- quartic-table

struct QuarticOpts {
  std::vector<int> n_grid{100};
  int ref_n = 1024;
  double eps = 1e-5;
  std::string quantity = "eigenvalue";
  int coeff_count = 48;
  std::string out;
  int jobs = default_jobs();
};

void run_quartic(QuarticOpts opts) {
  sort_unique(opts.n_grid);
  if (opts.n_grid.empty()) throw usage_error("quartic-table: empty --n-grid");
  if (opts.quantity != "eigenvalue" && opts.quantity != "eigenvector") {
    throw usage_error(
        "quartic-table: --quantity must be eigenvalue or eigenvector");
  }
  if (opts.n_grid.back() >= opts.ref_n) {
    throw usage_error("quartic-table: --ref-n must exceed every grid size");
  }
  const ModelHamiltonian ref = with_record("ref N=" + fmt_int(opts.ref_n), [&] {
    ModelHamiltonian H =
        build_hamiltonian(GridSpec::make(opts.ref_n), HamiltonianKind::quartic);
    H.eigensystem();
    return H;
  });

  struct Row {
    int n_size = 0;
    int n_max = 0;
  };
  const auto rows = parallel_map(
      static_cast<int>(opts.n_grid.size()), opts.jobs, [&](int idx) {
        const int n_size = opts.n_grid[idx];
        return with_record("N=" + fmt_int(n_size), [&] {
          const GridSpec grid = GridSpec::make(n_size);
          const ModelHamiltonian work =
              build_hamiltonian(grid, HamiltonianKind::quartic);
          int count = std::min(grid.max_trusted_index(),
                               ref.grid().max_trusted_index()) +
                      1;
          if (opts.quantity == "eigenvector") {
            count = std::min(count, opts.coeff_count);
          }
          const QuarticDeviations dev =
              quartic_deviations(work, ref, count, opts.coeff_count);
          const auto& series = opts.quantity == "eigenvalue"
                                   ? dev.eigenvalue
                                   : dev.eigenvector;
          return Row{n_size, contiguous_threshold(series, opts.eps)};
        });
      });

  CsvDoc doc({"N", "threshold_eps", "n_max", "ratio"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "quartic-table");
  doc.add_meta("ref_n", fmt_int(opts.ref_n));
  doc.add_meta("eps", fmt_g17(opts.eps));
  doc.add_meta("quantity", opts.quantity);
  doc.add_meta("coeff_count", fmt_int(opts.coeff_count));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  for (const auto& row : rows) {
    doc.add_row({fmt_int(row.n_size), fmt_g17(opts.eps), fmt_int(row.n_max),
                 fmt_g17(static_cast<double>(row.n_max) / row.n_size)});
  }
  emit(resolve_out(opts.out, "quartic-table"), doc);
}

// ------------------------------------------------------------------ amplitude

struct AmplitudeOpts {
  int n = 128;
  std::vector<double> t_grid{0.7, std::numbers::pi / 2.0, 3.0};
  int nprime = 8;
  std::string profile = "inverse";
  std::string method = "exact";
  double eps = 1e-3;
  int position_j = std::numeric_limits<int>::min();
  long shots = 0;
  unsigned long long seed = 1234;
  std::string out;
  int jobs = default_jobs();
};

SpectralCoefficients amplitude_coefficients(const AmplitudeOpts& opts) {
  if (opts.nprime < 0) throw usage_error("amplitude: --nprime must be >= 0");
  cvec raw(opts.nprime + 1);
  for (int n = 0; n <= opts.nprime; ++n) {
    raw[n] = opts.profile == "uniform" ? 1.0 : 1.0 / (n + 1.0);
  }
  return SpectralCoefficients::make(std::move(raw));
}

void run_amplitude(AmplitudeOpts opts) {
  sort_unique(opts.t_grid);
  if (opts.t_grid.empty()) throw usage_error("amplitude: empty --t-grid");
  if (opts.profile != "inverse" && opts.profile != "uniform") {
    throw usage_error("amplitude: --profile must be inverse or uniform");
  }
  if (opts.method != "exact" && opts.method != "plan") {
    throw usage_error("amplitude: --method must be exact or plan");
  }
  const GridSpec grid = GridSpec::make(opts.n);
  const SpectralCoefficients c = amplitude_coefficients(opts);
  const bool positional = opts.position_j != std::numeric_limits<int>::min();
  if (opts.method == "exact") {
    build_hamiltonian(grid, HamiltonianKind::qho).eigensystem();
  }

  struct Row {
    double t = 0.0;
    cplx value;
    cplx reference;
  };
  const auto rows = parallel_map(
      static_cast<int>(opts.t_grid.size()), opts.jobs, [&](int idx) {
        const double t = opts.t_grid[idx];
        return with_record("t=" + fmt_g17(t), [&] {
          AmplitudeOptions options;
          if (opts.method == "plan") {
            options.plan = select_plan(opts.nprime, t, opts.eps);
          }
          if (positional) options.position_j = opts.position_j;
          Row row;
          row.t = t;
          if (opts.shots > 0) {
            // Interferometric estimate of the same overlap: sandwich the
            // propagator between basis-completion unitaries for the in/out
            // superpositions.
            const cvec phi = spectral_state(grid, c);
            const std::vector<cvec> pin = completion_unitary(phi);
            const std::vector<cvec> pout =
                positional ? std::vector<cvec>() : pin;
            const auto applier = [&](const cvec& w) {
              cvec v(grid.n, cplx(0.0));
              for (int k = 0; k < grid.n; ++k) {
                for (int i = 0; i < grid.n; ++i) v[i] += w[k] * pin[k][i];
              }
              if (opts.method == "plan") {
                const GeneratorSchedule schedule = build_schedule(
                    options.plan->p, options.plan->s, SplittingKind::qho);
                for (long step = 0; step < options.plan->k; ++step) {
                  v = apply_schedule(schedule, v, grid);
                }
              } else {
                v = exact_propagate(
                    build_hamiltonian(grid, HamiltonianKind::qho), t, v);
              }
              if (positional) {
                // e_0 readout row = amplitude at the requested grid index.
                cvec picked(grid.n, cplx(0.0));
                picked[0] = v[opts.position_j + grid.n / 2];
                return picked;
              }
              cvec out(grid.n, cplx(0.0));
              for (int k = 0; k < grid.n; ++k) out[k] = inner(pout[k], v);
              return out;
            };
            HadamardTestOptions ht;
            ht.shots = opts.shots;
            ht.seed = opts.seed + static_cast<unsigned long long>(idx);
            row.value = hadamard_test(applier, grid.n, ht);
          } else {
            row.value = discrete_amplitude(grid, c, c, t, options);
          }
          if (positional) {
            const double x = grid.x_at(opts.position_j + grid.n / 2);
            const double prefactor =
                std::pow(2.0 * std::numbers::pi / grid.n, 0.25);
            cplx acc = 0.0;
            for (int n = 0; n <= c.n_prime(); ++n) {
              acc += c.coeffs[n] * std::polar(1.0, -(n + 0.5) * t) *
                     hermite_eval(n, x);
            }
            row.reference = prefactor * acc;
          } else {
            row.reference = cv_amplitude(c, c, t);
          }
          return row;
        });
      });

  CsvDoc doc({"t", "re", "im", "re_ref", "im_ref", "abs_diff"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "amplitude");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("nprime", fmt_int(opts.nprime));
  doc.add_meta("profile", opts.profile);
  doc.add_meta("method", opts.method);
  if (opts.method == "plan") doc.add_meta("eps", fmt_g17(opts.eps));
  if (positional) doc.add_meta("position_j", fmt_int(opts.position_j));
  doc.add_meta("shots", fmt_int(opts.shots));
  if (opts.shots > 0) doc.add_meta("seed", fmt_int(static_cast<long>(opts.seed)));
  doc.add_meta("jobs", fmt_int(opts.jobs));
  for (const auto& row : rows) {
    doc.add_row({fmt_g17(row.t), fmt_g17(row.value.real()),
                 fmt_g17(row.value.imag()), fmt_g17(row.reference.real()),
                 fmt_g17(row.reference.imag()),
                 fmt_g17(std::abs(row.value - row.reference))});
  }
  emit(resolve_out(opts.out, "amplitude"), doc);
}

// ----------------------------------------------------------------------- frft

struct FrftOpts {
  int n = 128;
  double order = 1.0;
  std::string method = "exact";
  double eps = 1e-6;
  int mode_n = 1;
  std::string in;
  std::string out;
};

cvec read_signal(const std::string& path, int n) {
  std::ifstream file(path);
  if (!file) throw usage_error("frft: cannot open input " + path);
  cvec signal;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string re_cell, im_cell;
    if (!std::getline(row, re_cell, ',') || !std::getline(row, im_cell)) {
      throw usage_error("frft: malformed signal row: " + line);
    }
    try {
      signal.emplace_back(std::stod(re_cell), std::stod(im_cell));
    } catch (const std::exception&) {
      if (signal.empty()) continue;  // header row
      throw usage_error("frft: malformed signal row: " + line);
    }
  }
  if (static_cast<int>(signal.size()) != n) {
    throw usage_error("frft: signal length " +
                      fmt_int(static_cast<long>(signal.size())) +
                      " does not match --n " + fmt_int(n));
  }
  return signal;
}

void run_frft(const FrftOpts& opts) {
  if (opts.method != "exact" && opts.method != "plan") {
    throw usage_error("frft: --method must be exact or plan");
  }
  const GridSpec grid = GridSpec::make(opts.n);
  cvec signal;
  if (!opts.in.empty()) {
    signal = read_signal(opts.in, opts.n);
  } else {
    signal = normalized(make_hermite_state(grid, opts.mode_n, true).amplitudes);
  }
  const PropagationMethod method = opts.method == "exact"
                                       ? PropagationMethod::exact
                                       : PropagationMethod::plan;
  const cvec result = frft_apply(grid, signal, opts.order, method, opts.eps);

  CsvDoc doc({"re", "im"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "frft");
  doc.add_meta("N", fmt_int(opts.n));
  doc.add_meta("order", fmt_g17(opts.order));
  doc.add_meta("method", opts.method);
  if (opts.method == "plan") doc.add_meta("eps", fmt_g17(opts.eps));
  doc.add_meta("input", opts.in.empty() ? "hermite:" + fmt_int(opts.mode_n)
                                        : opts.in);
  for (const auto& amp : result) {
    doc.add_row({fmt_g17(amp.real()), fmt_g17(amp.imag())});
  }
  emit(resolve_out(opts.out, "frft"), doc);
}

// ------------------------------------------------------------------ sp2-defect

struct Sp2Opts {
  int order = 1;
  std::string out;
};

void run_sp2(const Sp2Opts& opts) {
  const Sp2Poly poly = defect_poly(opts.order);
  CsvDoc doc({"degree", "re_a", "im_a", "re_b", "im_b", "re_c", "im_c"});
  doc.add_meta("tool", "oscsim");
  doc.add_meta("subcommand", "sp2-defect");
  doc.add_meta("order", fmt_int(opts.order));
  for (int d = 0; d <= poly.degree(); ++d) {
    const Sp2Vector v = poly.at(d);
    doc.add_row({fmt_int(d), fmt_g17(v.a.real()), fmt_g17(v.a.imag()),
                 fmt_g17(v.b.real()), fmt_g17(v.b.imag()),
                 fmt_g17(v.c.real()), fmt_g17(v.c.imag())});
  }
  doc.add_footer("lowest_degree=" + fmt_int(lowest_degree(poly, 1e-9)));
  emit(resolve_out(opts.out, "sp2-defect"), doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized-oscillator simulation experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI-style file");
  app.allow_config_extras(false);

  SpectrumOpts spectrum;
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "Eigenvalues against a reference");
  spectrum_cmd->add_option("--n-grid", spectrum.n_grid, "Grid sizes")
      ->delimiter(',');
  spectrum_cmd->add_option("--kind", spectrum.kind, "Hamiltonian kind")
      ->check(CLI::IsMember({"qho", "quartic"}));
  spectrum_cmd->add_option("--max-n", spectrum.max_n,
                           "Highest mode (-1 = trusted range)");
  spectrum_cmd->add_option("--ref-n", spectrum.ref_n,
                           "Quartic reference size (0 = largest grid)");
  spectrum_cmd->add_option("--out", spectrum.out, "Output CSV path");
  spectrum_cmd->add_option("--jobs", spectrum.jobs, "Worker threads");

  OverlapOpts overlap;
  auto* overlap_cmd = app.add_subcommand(
      "overlap-matrix", "Eigenvector overlaps with the Hermite basis");
  overlap_cmd->add_option("--n", overlap.n, "Grid size");
  overlap_cmd->add_option("--kind", overlap.kind, "Hamiltonian kind")
      ->check(CLI::IsMember({"qho", "quartic"}));
  overlap_cmd->add_option("--max-n", overlap.max_n,
                          "Highest mode (-1 = trusted range)");
  overlap_cmd->add_option("--out", overlap.out, "Output CSV path");

  EigErrorOpts eig_error;
  auto* eig_error_cmd = app.add_subcommand(
      "eig-error-scan", "Eigenvalue error decay across grid sizes");
  eig_error_cmd->add_option("--n-grid", eig_error.n_grid, "Grid sizes")
      ->delimiter(',');
  eig_error_cmd->add_option("--ratio", eig_error.ratio,
                            "Mode index as a fraction of N");
  eig_error_cmd->add_option("--out", eig_error.out, "Output CSV path");
  eig_error_cmd->add_option("--jobs", eig_error.jobs, "Worker threads");

  TrotterErrorOpts trotter_error_opts;
  auto* trotter_error_cmd = app.add_subcommand(
      "trotter-error-n", "Single-step splitting error across modes");
  trotter_error_cmd->add_option("--n", trotter_error_opts.n, "Grid size");
  trotter_error_cmd
      ->add_option("--kind", trotter_error_opts.kind, "Hamiltonian kind")
      ->check(CLI::IsMember({"qho", "quartic"}));
  trotter_error_cmd->add_option("-p,--order", trotter_error_opts.p,
                                "Product-formula order");
  trotter_error_cmd->add_option("--s", trotter_error_opts.s, "Step span");
  trotter_error_cmd->add_option("--n-min", trotter_error_opts.n_min,
                                "Lowest mode");
  trotter_error_cmd->add_option("--n-max", trotter_error_opts.n_max,
                                "Highest mode");
  trotter_error_cmd->add_option("--out", trotter_error_opts.out,
                                "Output CSV path");
  trotter_error_cmd->add_option("--jobs", trotter_error_opts.jobs,
                                "Worker threads");

  ConvergeOpts converge;
  auto* converge_cmd = app.add_subcommand(
      "trotter-converge", "Planned product formulas vs target accuracy");
  converge_cmd->add_option("--n-grid", converge.n_grid, "Grid sizes")
      ->delimiter(',');
  converge_cmd->add_option("--t", converge.t, "Evolution time");
  converge_cmd->add_option("--eps", converge.eps, "Target accuracy");
  converge_cmd->add_option("--out", converge.out, "Output CSV path");
  converge_cmd->add_option("--jobs", converge.jobs, "Worker threads");

  PrepOpts prep;
  auto* prep_cmd = app.add_subcommand(
      "prep-ground", "Ground-state preparation error vs delta");
  prep_cmd->add_option("--n", prep.n, "Grid size");
  prep_cmd->add_option("--delta-grid", prep.delta_grid, "Gaussian widths")
      ->delimiter(',');
  prep_cmd->add_flag("--flip-p2-sign", prep.flip_p2_sign,
                     "Use the wrong momentum-phase sign");
  prep_cmd->add_option("--out", prep.out, "Output CSV path");
  prep_cmd->add_option("--jobs", prep.jobs, "Worker threads");

  LadderOpts ladder;
  auto* ladder_cmd =
      app.add_subcommand("jc-ladder", "Eigenstate ladder fidelities");
  ladder_cmd->add_option("--n", ladder.n, "Grid size");
  ladder_cmd->add_option("--targets", ladder.targets, "Target mode indices")
      ->delimiter(',');
  ladder_cmd->add_option("--mode", ladder.mode, "exact, trotter, or both")
      ->check(CLI::IsMember({"exact", "trotter", "both"}));
  ladder_cmd->add_option("--eps", ladder.eps, "Trotter accuracy target");
  ladder_cmd->add_option("--c", ladder.c, "Steps-per-rung constant");
  ladder_cmd->add_flag("--start-gaussian", ladder.start_gaussian,
                       "Start from the prepared Gaussian ground state");
  ladder_cmd->add_option("--prep-delta", ladder.prep_delta,
                         "Gaussian width for --start-gaussian");
  ladder_cmd->add_option("--out", ladder.out, "Output CSV path");
  ladder_cmd->add_option("--jobs", ladder.jobs, "Worker threads");

  QuarticOpts quartic;
  auto* quartic_cmd = app.add_subcommand(
      "quartic-table", "Agreement thresholds against a reference grid");
  quartic_cmd->add_option("--n-grid", quartic.n_grid, "Grid sizes")
      ->delimiter(',');
  quartic_cmd->add_option("--ref-n", quartic.ref_n, "Reference grid size");
  quartic_cmd->add_option("--eps", quartic.eps, "Agreement threshold");
  quartic_cmd->add_option("--quantity", quartic.quantity,
                          "eigenvalue or eigenvector")
      ->check(CLI::IsMember({"eigenvalue", "eigenvector"}));
  quartic_cmd->add_option("--coeff-count", quartic.coeff_count,
                          "Hermite coefficients per eigenvector profile");
  quartic_cmd->add_option("--out", quartic.out, "Output CSV path");
  quartic_cmd->add_option("--jobs", quartic.jobs, "Worker threads");

  AmplitudeOpts amplitude;
  auto* amplitude_cmd = app.add_subcommand(
      "amplitude", "Scattering amplitudes vs the spectral reference");
  amplitude_cmd->add_option("--n", amplitude.n, "Grid size");
  amplitude_cmd->add_option("--t-grid", amplitude.t_grid, "Evolution times")
      ->delimiter(',');
  amplitude_cmd->add_option("--nprime", amplitude.nprime,
                            "Highest coefficient index");
  amplitude_cmd->add_option("--profile", amplitude.profile,
                            "Coefficient profile")
      ->check(CLI::IsMember({"inverse", "uniform"}));
  amplitude_cmd->add_option("--method", amplitude.method,
                            "Propagation method")
      ->check(CLI::IsMember({"exact", "plan"}));
  amplitude_cmd->add_option("--eps", amplitude.eps, "Plan accuracy");
  amplitude_cmd->add_option("--position-j", amplitude.position_j,
                            "Project onto grid index j instead");
  amplitude_cmd->add_option("--shots", amplitude.shots,
                            "Hadamard-test shots (0 = direct)");
  amplitude_cmd->add_option("--seed", amplitude.seed, "Sampling seed");
  amplitude_cmd->add_option("--out", amplitude.out, "Output CSV path");
  amplitude_cmd->add_option("--jobs", amplitude.jobs, "Worker threads");

  FrftOpts frft;
  auto* frft_cmd =
      app.add_subcommand("frft", "Fractional Fourier transform of a signal");
  frft_cmd->add_option("--n", frft.n, "Grid size");
  frft_cmd->add_option("--order", frft.order, "Transform order");
  frft_cmd->add_option("--method", frft.method, "Propagation method")
      ->check(CLI::IsMember({"exact", "plan"}));
  frft_cmd->add_option("--eps", frft.eps, "Plan accuracy");
  frft_cmd->add_option("--mode-n", frft.mode_n,
                       "Hermite input mode when --in is absent");
  frft_cmd->add_option("--in", frft.in, "Input signal CSV (re,im rows)");
  frft_cmd->add_option("--out", frft.out, "Output CSV path");

  Sp2Opts sp2;
  auto* sp2_cmd = app.add_subcommand(
      "sp2-defect", "Product-formula defect polynomial coefficients");
  sp2_cmd->add_option("-p,--order", sp2.order, "Product-formula order");
  sp2_cmd->add_option("--out", sp2.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (spectrum_cmd->parsed()) run_spectrum(spectrum);
    if (overlap_cmd->parsed()) run_overlap(overlap);
    if (eig_error_cmd->parsed()) run_eig_error(eig_error);
    if (trotter_error_cmd->parsed()) run_trotter_error(trotter_error_opts);
    if (converge_cmd->parsed()) run_converge(converge);
    if (prep_cmd->parsed()) run_prep(prep);
    if (ladder_cmd->parsed()) run_ladder(ladder);
    if (quartic_cmd->parsed()) run_quartic(quartic);
    if (amplitude_cmd->parsed()) run_amplitude(amplitude);
    if (frft_cmd->parsed()) run_frft(frft);
    if (sp2_cmd->parsed()) run_sp2(sp2);
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
