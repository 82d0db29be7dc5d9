#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "oscsim/numerics.hpp"
#include "oscsim/oscillator.hpp"
#include "oscsim/trotter.hpp"
#include "oscsim/types.hpp"

namespace oscsim {

/// Formats a double with 17 significant digits (%.17g, round-trip exact).
std::string fmt_g17(double v);

/// One CSV document: "#" metadata lines, a header row, data rows, then
/// "#" footer lines. Serialized in a single pass so callers can write the
/// complete text at once and never leave partial files behind.
class CsvDoc {
 public:
  explicit CsvDoc(std::vector<std::string> columns);

  void add_meta(const std::string& key, const std::string& value);
  /// Cell count must match the column count.
  void add_row(std::vector<std::string> cells);
  /// Line is emitted with a "# " prefix.
  void add_footer(std::string line);

  int row_count() const { return static_cast<int>(rows_.size()); }
  std::string serialize() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> footers_;
};

/// Writes the full text to path in one stream; throws numerical_error on
/// I/O failure. Callers assemble the complete document first.
void write_text_file(const std::string& path, const std::string& text);

/// Runs fn(i) for i in [0, count) on up to jobs threads; results land in
/// index order no matter how the work is scheduled. The first worker
/// exception is rethrown after all threads join.
template <typename Fn>
auto parallel_map(int count, int jobs, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, int>> {
  using T = std::invoke_result_t<Fn&, int>;
  std::vector<T> results(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return results;
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          results[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (error) std::rethrow_exception(error);
  return results;
}

enum class FitModel { loglinear, powerlaw };

/// loglinear fits ln(y) against x; powerlaw fits ln(y) against ln(x).
/// Values entering a logarithm must be positive; needs >= 3 samples.
FitResult fit_samples(FitModel model, const std::vector<double>& xs,
                      const std::vector<double>& ys);

/// "# fit slope=... intercept=... r2=..." (17 significant digits).
std::string fit_footer(const FitResult& fit);

/// Largest n with deviations[m] <= eps for every m <= n; -1 if none.
int contiguous_threshold(const std::vector<double>& deviations, double eps);

/// Per-mode deviations between a working-grid and a reference-grid quartic
/// eigensystem: eigenvalue[n] = |E_n - E_n^ref|; eigenvector[n] compares
/// the modes as coeff_count-long coefficient vectors over the periodized
/// Hermite basis, each phase-fixed so its largest coefficient is real
/// positive (grid-size-independent representation).
struct QuarticDeviations {
  std::vector<double> eigenvalue;
  std::vector<double> eigenvector;
};

QuarticDeviations quartic_deviations(const ModelHamiltonian& work,
                                     const ModelHamiltonian& reference,
                                     int count, int coeff_count = 48);

/// End-to-end error of a plan on mode n: the schedule at span plan.s is
/// applied plan.k times and compared against exact evolution for the full
/// time. The reference state follows trotter_error's kind convention.
double plan_error(const ModelHamiltonian& H, const TrotterPlan& plan, int n);

}  // namespace oscsim
