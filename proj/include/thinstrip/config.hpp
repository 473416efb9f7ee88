#pragma once

// Run configuration: an INI-style file with [profile], [grids], [sweep],
// [unbounded] and [output] sections.
//
// The raw key/value text is kept alongside the typed view so that reports
// can carry the exact effective configuration (file values, defaults and
// command-line overrides merged).

#include "thinstrip/profile.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace thinstrip {

struct GridPolicy {
  /// Elements in x for the 2D problem; 0 applies max(nx_min, nx_coef / eps^alpha).
  std::size_t nx = 0;
  std::size_t nx_min = 400;
  double nx_coef = 40.0;
  std::size_t nt = 12;
  int t_order = 3;
  int x_order = 2;
  /// Interior points of the limit-operator grid.
  std::size_t n_limit = 8000;
  /// Interior points of the reduced-operator grid.
  std::size_t n_reduced = 32000;
  /// Limit-operator half-width; 0 picks 10 (m >= 2) or 14 (m = 1).
  double L = 0.0;

  std::size_t nx_for(const Profile& p, double eps) const;
  double limit_window(const Profile& p) const;
};

struct SweepSettings {
  std::vector<double> eps;
  std::size_t jmax = 3;
  std::vector<BoundaryKind> bcs;
  /// Worker threads for independent (eps, bc) cells; 0 uses the hardware count.
  std::size_t threads = 0;
  double tol_1d = 1e-10;
  double tol_2d = 1e-10;
  bool dense_oracle = false;
};

struct UnboundedSettings {
  double a = 1.0;
  /// Truncation half-width of the full problem; 0 uses a + 4 M / (M - M_tail).
  double R = 0.0;
  /// Element size outside [-a, a] relative to the inner element size.
  std::size_t outer_coarsening = 4;
};

struct OutputSettings {
  /// Empty writes to standard output.
  std::filesystem::path path;
  std::string format = "csv";
  /// Wall-clock timings make reports non-reproducible, so they are opt-in.
  bool record_timing = false;
};

class Config {
public:
  using Sections = std::map<std::string, std::map<std::string, std::string>>;

  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  /// Replace one value, e.g. set("sweep.eps", "0.1, 0.05"). The whole
  /// configuration is revalidated; on failure nothing changes.
  void set(const std::string& dotted_key, const std::string& value);

  const Profile& profile() const { return *profile_; }
  const GridPolicy& grids() const noexcept { return grids_; }
  const SweepSettings& sweep() const noexcept { return sweep_; }
  const UnboundedSettings& unbounded() const noexcept { return unbounded_; }
  const OutputSettings& output() const noexcept { return output_; }

  /// Effective key/value pairs, defaults included.
  const Sections& snapshot() const noexcept { return effective_; }
  std::string to_ini() const;

private:
  Config() = default;
  static Config from_sections(Sections given);

  Sections given_;
  Sections effective_;
  std::optional<Profile> profile_;
  GridPolicy grids_;
  SweepSettings sweep_;
  UnboundedSettings unbounded_;
  OutputSettings output_;
};

/// "D" / "DN" labels used in configs and reports.
std::string bc_label(BoundaryKind bc);
BoundaryKind parse_bc_label(const std::string& label);

} // namespace thinstrip
