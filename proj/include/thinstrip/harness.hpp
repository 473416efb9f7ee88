#pragma once

// Sweep engine and command runners. Every runner is a pure function of the
// configuration (plus the limit-solver cache, which only memoizes).

#include "thinstrip/config.hpp"
#include "thinstrip/report.hpp"
#include "thinstrip/schrodinger1d.hpp"
#include "thinstrip/strip2d.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace thinstrip {

/// Memoized limit-operator spectra keyed by everything the solve depends on.
/// Hits return a copy of the stored spectrum, bit-identical to a fresh solve.
class LimitCache {
public:
  std::shared_ptr<const Spectrum1D> get(const Profile& p, double L, std::size_t n, std::size_t k,
                                        const SolveOptions1D& opts);
  std::size_t size() const;
  std::size_t hits() const;

private:
  using Key = std::tuple<std::string, double, std::size_t, std::size_t, double, int>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const Spectrum1D>> entries_;
  std::size_t hits_ = 0;
};

struct SweepRecord {
  double eps = 0.0;
  std::size_t j = 0;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  double lambda_raw = 0.0;
  double lambda_shifted = 0.0;
  double scaled_gap = 0.0;
  double mu_j = 0.0;
  double prediction = 0.0;
  double abs_err = 0.0;
  double lambda_reduced = 0.0;
  double resolvent_gap = 0.0;
  double residual = 0.0;
  double wall_ms = 0.0;
};

/// Column order of sweep tables.
const std::vector<std::string>& sweep_columns();

struct CellDiagnostics {
  double eps = 0.0;
  BoundaryKind bc = BoundaryKind::Dirichlet;
  bool ok = false;
  std::string error_kind;
  std::string error;
  std::size_t nx = 0;
  std::size_t n_dof = 0;
  std::size_t iterations = 0;
  std::size_t factor_nonzeros = 0;
  std::vector<double> ansatz_error;
  std::vector<double> reduced_residual;
  std::size_t floor_violations = 0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<CellDiagnostics> cells;
  std::shared_ptr<const Spectrum1D> limit;
  double limit_window = 0.0;
  std::size_t failed_cells() const;
};

/// One 2D solve, one reduced solve and the cached limit solve per (eps, bc)
/// cell; cells run on a bounded worker pool and failures become NaN rows.
/// `threads` overrides the configured worker count when nonzero.
SweepResult run_sweep(const Config& cfg, LimitCache& cache, std::size_t threads = 0);
Report sweep_report(const Config& cfg, const SweepResult& result);

struct UnboundedRow {
  double eps = 0.0;
  std::size_t j = 0;
  double lambda_dn = 0.0;
  double lambda_full = 0.0;
  double lambda_d = 0.0;
  bool below_essential_floor = false;
  bool bracket_ok = false;
  double tail_mass = 0.0;
  double residual = 0.0;
};

struct UnboundedLevel {
  double eps = 0.0;
  double base_floor = 0.0;      // pi^2 / (M^2 eps^2)
  double essential_floor = 0.0; // pi^2 / (M_a^2 eps^2)
  std::size_t count_below = 0;  // n(eps) on the truncated problem
  std::size_t count_below_base = 0;
  std::size_t n_dof_full = 0;
};

struct UnboundedReport {
  double a = 0.0;
  double R = 0.0;
  double M_a = 0.0;
  std::vector<UnboundedLevel> levels;
  std::vector<UnboundedRow> rows;
};

UnboundedReport run_unbounded(const Config& cfg);
Report unbounded_report(const Config& cfg, const UnboundedReport& result);

struct StripDumps {
  std::filesystem::path matrices; // directory; empty disables
  std::filesystem::path vectors;  // directory; empty disables
};

Report run_limit(const Config& cfg, LimitCache& cache);
Report run_reduced(const Config& cfg);
Report run_strip(const Config& cfg, const StripDumps& dumps = {});
Report run_compare_bc(const Config& cfg, LimitCache& cache);

/// Dispatch by subcommand name: limit, reduced, strip, sweep, compare-bc,
/// unbounded.
Report run_command(const std::string& command, const Config& cfg, const StripDumps& dumps = {});

/// Configuration snapshot as a JSON object of string values.
nlohmann::json config_json(const Config& cfg);

} // namespace thinstrip
