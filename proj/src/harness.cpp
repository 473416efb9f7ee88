#include "thinstrip/harness.hpp"

#include "thinstrip/asymptotics.hpp"
#include "thinstrip/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace thinstrip {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json nums(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

// Eigenfunction mass allowed beyond |x| = a before R is deemed too small.
constexpr double kTailMassLimit = 1e-4;

std::string eps_tag(double eps) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, eps);
  return std::string(buf, r.ptr);
}

SolveOptions1D options_1d(const Config& cfg) {
  SolveOptions1D o;
  o.tol = cfg.sweep().tol_1d;
  o.method = cfg.sweep().dense_oracle ? EigenMethod::Dense : EigenMethod::Bisection;
  return o;
}

SolveOptions2D options_2d(const Config& cfg) {
  SolveOptions2D o;
  o.tol = cfg.sweep().tol_2d;
  return o;
}

AssemblyOptions assembly_options(const Config& cfg) {
  AssemblyOptions o;
  o.t_order = cfg.grids().t_order;
  o.x_order = cfg.grids().x_order;
  return o;
}

// Log-log slope over the finite positive samples; NaN when fewer than two.
double fitted_slope(const std::vector<double>& eps, const std::vector<double>& values) {
  std::vector<double> e, v;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (std::isfinite(values[i]) && values[i] > 0.0) {
      e.push_back(eps[i]);
      v.push_back(values[i]);
    }
  if (e.size() < 2) return kNaN;
  return loglog_slope(e, v);
}

bool strictly_decreasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || (i > 0 && !(v[i] < v[i - 1]))) return false;
  return true;
}

struct CellOutput {
  std::vector<SweepRecord> records;
  CellDiagnostics diag;
};

CellOutput run_cell(const Config& cfg, double eps, BoundaryKind bc, const Spectrum1D& limit) {
  const auto start = std::chrono::steady_clock::now();
  const Profile& p = cfg.profile();
  const std::size_t k = cfg.sweep().jmax;
  CellOutput out;
  out.diag.eps = eps;
  out.diag.bc = bc;
  out.diag.nx = cfg.grids().nx_for(p, eps);

  const SparsePair sp = assemble_mapped(p, eps, out.diag.nx, cfg.grids().nt, bc, assembly_options(cfg));
  const Spectrum2D spec = solve_strip(sp, k, options_2d(cfg));
  const Spectrum1D red = solve_reduced(p, eps, bc, cfg.grids().n_reduced, k, options_1d(cfg));
  if (limit.size() < k) fail(ErrorKind::Index, "limit spectrum holds fewer than jmax pairs");

  out.diag.n_dof = sp.n_dof();
  out.diag.iterations = spec.iterations;
  out.diag.factor_nonzeros = spec.factor_nonzeros;
  out.diag.reduced_residual = red.residuals;
  const double floor = spectral_floor(p, eps);
  for (std::size_t j = 0; j < k; ++j) {
    if (spec.values[j] < floor) ++out.diag.floor_violations;
    SweepRecord r;
    r.eps = eps;
    r.j = j + 1;
    r.bc = bc;
    r.lambda_raw = spec.values[j];
    r.lambda_shifted = spec.values[j] - floor;
    r.scaled_gap = scaled_gap(spec.values[j], p, eps);
    r.mu_j = limit.values[j];
    r.prediction = predict_eigenvalue(p, eps, limit.values[j], j + 1).predicted_lambda;
    r.abs_err = std::abs(r.scaled_gap - r.mu_j);
    r.lambda_reduced = red.values[j];
    r.resolvent_gap = resolvent_gap(spec.values[j], red.values[j], p, eps);
    r.residual = spec.residuals[j];
    out.records.push_back(r);
    out.diag.ansatz_error.push_back(product_ansatz_error(sp, spec, j + 1, limit));
  }
  out.diag.ok = true;
  if (cfg.output().record_timing) {
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : out.records) r.wall_ms = ms;
  }
  return out;
}

CellOutput failed_cell(double eps, BoundaryKind bc, std::size_t k, const std::string& kind, const std::string& what,
                       const Spectrum1D& limit) {
  CellOutput out;
  out.diag.eps = eps;
  out.diag.bc = bc;
  out.diag.error_kind = kind;
  out.diag.error = what;
  for (std::size_t j = 0; j < k; ++j) {
    SweepRecord r;
    r.eps = eps;
    r.j = j + 1;
    r.bc = bc;
    r.lambda_raw = r.lambda_shifted = r.scaled_gap = r.prediction = r.abs_err = kNaN;
    r.lambda_reduced = r.resolvent_gap = r.residual = kNaN;
    r.mu_j = j < limit.size() ? limit.values[j] : kNaN;
    out.records.push_back(r);
  }
  return out;
}

nlohmann::json limit_json(const SweepResult& s, const Config& cfg) {
  return {{"L", s.limit_window},
          {"n", cfg.grids().n_limit},
          {"method", cfg.sweep().dense_oracle ? "dense" : "bisection"},
          {"mu", nums(s.limit->values)},
          {"residuals", nums(s.limit->residuals)}};
}

} // namespace

// ---------------------------------------------------------------------------

std::shared_ptr<const Spectrum1D> LimitCache::get(const Profile& p, double L, std::size_t n, std::size_t k,
                                                  const SolveOptions1D& opts) {
  const Key key{p.describe(), L, n, k, opts.tol, static_cast<int>(opts.method)};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto fresh = std::make_shared<const Spectrum1D>(solve_limit(p, L, n, k, opts));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(fresh)).first->second;
}

std::size_t LimitCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t LimitCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c = {"eps",        "j",          "bc",             "lambda_raw",
                                             "lambda_shifted", "scaled_gap", "mu_j",       "prediction",
                                             "abs_err",    "lambda_reduced", "resolvent_gap", "residual",
                                             "wall_ms"};
  return c;
}

std::size_t SweepResult::failed_cells() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return !c.ok; }));
}

nlohmann::json config_json(const Config& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, keys] : cfg.snapshot())
    for (const auto& [key, value] : keys) j[section][key] = value;
  return j;
}

SweepResult run_sweep(const Config& cfg, LimitCache& cache, std::size_t threads) {
  const Profile& p = cfg.profile();
  if (p.is_flat()) fail(ErrorKind::Config, "a flat profile has no limit operator; use the strip command");
  const auto& s = cfg.sweep();
  SweepResult result;
  result.limit_window = cfg.grids().limit_window(p);
  result.limit = cache.get(p, result.limit_window, cfg.grids().n_limit, s.jmax, options_1d(cfg));

  struct Job {
    double eps;
    BoundaryKind bc;
  };
  std::vector<Job> jobs;
  for (double eps : s.eps)
    for (BoundaryKind bc : s.bcs) jobs.push_back({eps, bc});

  std::vector<CellOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        outputs[i] = run_cell(cfg, job.eps, job.bc, *result.limit);
      } catch (const Error& e) {
        outputs[i] = failed_cell(job.eps, job.bc, s.jmax, kind_name(e.kind()), e.what(), *result.limit);
      } catch (const std::exception& e) {
        outputs[i] = failed_cell(job.eps, job.bc, s.jmax, "internal", e.what(), *result.limit);
      }
    }
  };
  std::size_t n_workers = threads ? threads : s.threads;
  if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, jobs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  }

  // Jobs are enumerated in config order, so the output order never depends
  // on scheduling.
  for (auto& o : outputs) {
    result.records.insert(result.records.end(), o.records.begin(), o.records.end());
    result.cells.push_back(std::move(o.diag));
  }
  return result;
}

Report sweep_report(const Config& cfg, const SweepResult& result) {
  const Profile& p = cfg.profile();
  const auto& s = cfg.sweep();
  Report rep;
  rep.command = "sweep";
  rep.config = config_json(cfg);
  rep.table.columns = sweep_columns();
  for (const auto& r : result.records)
    rep.table.add_row({r.eps, static_cast<std::int64_t>(r.j), bc_label(r.bc), r.lambda_raw, r.lambda_shifted,
                       r.scaled_gap, r.mu_j, r.prediction, r.abs_err, r.lambda_reduced, r.resolvent_gap,
                       r.residual, r.wall_ms});

  auto find = [&](double eps, BoundaryKind bc, std::size_t j) -> const SweepRecord& {
    for (const auto& r : result.records)
      if (r.eps == eps && r.bc == bc && r.j == j) return r;
    fail(ErrorKind::Index, "missing sweep record");
  };

  nlohmann::json& res = rep.results;
  res["alpha"] = alpha(p);
  res["limit"] = limit_json(result, cfg);

  nlohmann::json conv = nlohmann::json::array();
  std::size_t floor_violations = 0;
  for (BoundaryKind bc : s.bcs) {
    for (std::size_t j = 1; j <= s.jmax; ++j) {
      std::vector<double> abs_err, rel_err, gap;
      for (double eps : s.eps) {
        const auto& r = find(eps, bc, j);
        abs_err.push_back(r.abs_err);
        rel_err.push_back(r.abs_err / r.mu_j);
        gap.push_back(r.resolvent_gap);
      }
      conv.push_back({{"bc", bc_label(bc)},
                      {"j", j},
                      {"eps", s.eps},
                      {"abs_err", nums(abs_err)},
                      {"rel_err", nums(rel_err)},
                      {"resolvent_gap", nums(gap)},
                      {"abs_err_slope", num(fitted_slope(s.eps, abs_err))},
                      {"resolvent_gap_slope", num(fitted_slope(s.eps, gap))},
                      {"abs_err_decreasing", strictly_decreasing(abs_err)},
                      {"resolvent_gap_decreasing", strictly_decreasing(gap)}});
    }
  }
  res["convergence"] = std::move(conv);

  const bool both = std::find(s.bcs.begin(), s.bcs.end(), BoundaryKind::Dirichlet) != s.bcs.end() &&
                    std::find(s.bcs.begin(), s.bcs.end(), BoundaryKind::Neumann) != s.bcs.end();
  if (both) {
    nlohmann::json diff = nlohmann::json::array();
    for (std::size_t j = 1; j <= s.jmax; ++j) {
      std::vector<double> d;
      for (double eps : s.eps)
        d.push_back(std::abs(find(eps, BoundaryKind::Dirichlet, j).scaled_gap -
                             find(eps, BoundaryKind::Neumann, j).scaled_gap));
      diff.push_back({{"j", j}, {"eps", s.eps}, {"scaled_difference", nums(d)}});
    }
    res["bc_difference"] = std::move(diff);
  }

  nlohmann::json cells = nlohmann::json::array(), failed = nlohmann::json::array();
  for (const auto& c : result.cells) {
    floor_violations += c.floor_violations;
    if (!c.ok) {
      failed.push_back({{"eps", c.eps}, {"bc", bc_label(c.bc)}, {"kind", c.error_kind}, {"message", c.error}});
      continue;
    }
    cells.push_back({{"eps", c.eps},
                     {"bc", bc_label(c.bc)},
                     {"nx", c.nx},
                     {"nt", cfg.grids().nt},
                     {"n_dof", c.n_dof},
                     {"iterations", c.iterations},
                     {"factor_nonzeros", c.factor_nonzeros},
                     {"ansatz_error", nums(c.ansatz_error)},
                     {"reduced_residual", nums(c.reduced_residual)},
                     {"floor_violations", c.floor_violations}});
  }
  res["cells"] = std::move(cells);
  res["failed_cells"] = std::move(failed);
  res["floor_violations"] = floor_violations;
  return rep;
}

// ---------------------------------------------------------------------------

Report run_limit(const Config& cfg, LimitCache& cache) {
  const Profile& p = cfg.profile();
  if (p.is_flat()) fail(ErrorKind::Config, "a flat profile has no limit operator");
  const double L = cfg.grids().limit_window(p);
  const auto spec = cache.get(p, L, cfg.grids().n_limit, cfg.sweep().jmax, options_1d(cfg));
  Report rep;
  rep.command = "limit";
  rep.config = config_json(cfg);
  rep.table.columns = {"j", "mu_j", "residual"};
  for (std::size_t j = 0; j < spec->size(); ++j)
    rep.table.add_row({static_cast<std::int64_t>(j + 1), spec->values[j], spec->residuals[j]});
  rep.results = {{"L", L},
                 {"n", cfg.grids().n_limit},
                 {"alpha", alpha(p)},
                 {"method", cfg.sweep().dense_oracle ? "dense" : "bisection"}};
  return rep;
}

Report run_reduced(const Config& cfg) {
  const Profile& p = cfg.profile();
  Report rep;
  rep.command = "reduced";
  rep.config = config_json(cfg);
  rep.table.columns = {"eps", "bc", "j", "lambda_reduced", "scaled_reduced", "residual"};
  for (double eps : cfg.sweep().eps) {
    for (BoundaryKind bc : cfg.sweep().bcs) {
      const Spectrum1D q = solve_reduced(p, eps, bc, cfg.grids().n_reduced, cfg.sweep().jmax, options_1d(cfg));
      const double scale = std::pow(eps, 2.0 * alpha(p));
      for (std::size_t j = 0; j < q.size(); ++j)
        rep.table.add_row({eps, bc_label(bc), static_cast<std::int64_t>(j + 1), q.values[j], scale * q.values[j],
                           q.residuals[j]});
    }
  }
  rep.results = {{"n", cfg.grids().n_reduced}, {"alpha", alpha(p)}};
  return rep;
}

Report run_strip(const Config& cfg, const StripDumps& dumps) {
  const Profile& p = cfg.profile();
  Report rep;
  rep.command = "strip";
  rep.config = config_json(cfg);
  rep.table.columns = {"eps", "bc", "j", "lambda_raw", "lambda_shifted", "scaled_gap", "residual"};
  nlohmann::json cells = nlohmann::json::array();
  std::size_t floor_violations = 0;
  for (const auto& dir : {dumps.matrices, dumps.vectors})
    if (!dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
    }
  for (double eps : cfg.sweep().eps) {
    for (BoundaryKind bc : cfg.sweep().bcs) {
      const std::size_t nx = cfg.grids().nx_for(p, eps);
      const SparsePair sp = assemble_mapped(p, eps, nx, cfg.grids().nt, bc, assembly_options(cfg));
      const Spectrum2D spec = solve_strip(sp, cfg.sweep().jmax, options_2d(cfg));
      const double floor = spectral_floor(p, eps);
      for (std::size_t j = 0; j < spec.size(); ++j) {
        if (spec.values[j] < floor) ++floor_violations;
        rep.table.add_row({eps, bc_label(bc), static_cast<std::int64_t>(j + 1), spec.values[j],
                           spec.shifted_values[j], scaled_gap(spec.values[j], p, eps), spec.residuals[j]});
      }
      cells.push_back({{"eps", eps},
                       {"bc", bc_label(bc)},
                       {"nx", nx},
                       {"nt", cfg.grids().nt},
                       {"n_dof", sp.n_dof()},
                       {"iterations", spec.iterations},
                       {"factor_nonzeros", spec.factor_nonzeros}});
      const std::string tag = "eps" + eps_tag(eps) + "_" + bc_label(bc);
      if (!dumps.matrices.empty()) {
        write_matrix_market(dumps.matrices / ("stiffness_" + tag + ".mtx"), sp.stiffness);
        write_matrix_market(dumps.matrices / ("mass_" + tag + ".mtx"), sp.mass);
      }
      if (!dumps.vectors.empty())
        for (std::size_t j = 0; j < spec.size(); ++j)
          write_eigenvector_csv(dumps.vectors / ("vector_" + tag + "_j" + std::to_string(j + 1) + ".csv"), sp, spec, j);
    }
  }
  rep.results = {{"cells", cells}, {"floor_violations", floor_violations}};
  return rep;
}

Report run_compare_bc(const Config& cfg_in, LimitCache& cache) {
  Config cfg = cfg_in;
  cfg.set("sweep.bc", "D, DN");
  const SweepResult sweep = run_sweep(cfg, cache);
  const Profile& p = cfg.profile();
  const auto& s = cfg.sweep();

  Report rep;
  rep.command = "compare-bc";
  rep.config = config_json(cfg);
  rep.table.columns = {"eps", "j", "lambda_D", "lambda_DN", "scaled_difference", "reduced_scaled_difference",
                       "resolution"};
  auto find = [&](double eps, BoundaryKind bc, std::size_t j) -> const SweepRecord& {
    for (const auto& r : sweep.records)
      if (r.eps == eps && r.bc == bc && r.j == j) return r;
    fail(ErrorKind::Index, "missing sweep record");
  };
  nlohmann::json per_j = nlohmann::json::array();
  for (std::size_t j = 1; j <= s.jmax; ++j) {
    std::vector<double> d, dq, resolution;
    for (double eps : s.eps) {
      const auto& rd = find(eps, BoundaryKind::Dirichlet, j);
      const auto& rn = find(eps, BoundaryKind::Neumann, j);
      const double scale = std::pow(eps, 2.0 * alpha(p));
      d.push_back(scale * std::abs(rd.lambda_raw - rn.lambda_raw));
      dq.push_back(scale * std::abs(rd.lambda_reduced - rn.lambda_reduced));
      // Differences below this are indistinguishable from solver round-off.
      resolution.push_back(scale * 1e-9 * std::max(std::abs(rd.lambda_raw), std::abs(rn.lambda_raw)));
      rep.table.add_row({eps, static_cast<std::int64_t>(j), rd.lambda_raw, rn.lambda_raw, d.back(), dq.back(),
                         resolution.back()});
    }
    bool monotone = std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); });
    for (std::size_t i = 1; monotone && i < d.size(); ++i) monotone = d[i] <= d[i - 1] || d[i] <= resolution[i];
    per_j.push_back({{"j", j},
                     {"eps", s.eps},
                     {"scaled_difference", nums(d)},
                     {"reduced_scaled_difference", nums(dq)},
                     {"resolution", nums(resolution)},
                     {"non_increasing", monotone}});
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& c : sweep.cells)
    if (!c.ok) failed.push_back({{"eps", c.eps}, {"bc", bc_label(c.bc)}, {"kind", c.error_kind}, {"message", c.error}});
  rep.results = {{"alpha", alpha(p)}, {"per_j", per_j}, {"failed_cells", failed}};
  return rep;
}

// ---------------------------------------------------------------------------

UnboundedReport run_unbounded(const Config& cfg) {
  const Profile& base = cfg.profile();
  if (!base.is_lorentzian()) fail(ErrorKind::Config, "the unbounded experiment needs a lorentzian profile");
  const auto& lc = std::get<LorentzianCap>(base.family());
  const auto& u = cfg.unbounded();

  UnboundedReport rep;
  rep.a = u.a;
  rep.R = u.R > 0.0 ? u.R : u.a + 4.0 * lc.M / (lc.M - lc.M_tail);
  if (!(rep.R > rep.a)) fail(ErrorKind::Config, "truncation R must exceed a");
  const Profile full = base.with_domain(-rep.R, rep.R);
  const Profile inner = base.with_domain(-rep.a, rep.a);
  rep.M_a = height(full, rep.a); // h decreases in |x|
  if (!(rep.M_a < lc.M)) fail(ErrorKind::Config, "h(a) must be below the peak height");

  const std::size_t k = cfg.sweep().jmax;
  const AssemblyOptions ao = assembly_options(cfg);
  const SolveOptions2D so = options_2d(cfg);
  for (double eps : cfg.sweep().eps) {
    // The full grid coincides with the segment grid on [-a, a] and is
    // coarsened outside, so both segment spaces embed in the full space.
    std::size_t n_in = cfg.grids().nx_for(inner, eps);
    n_in += n_in % 2;
    const double h_in = 2.0 * rep.a / static_cast<double>(n_in);
    const auto n_out = static_cast<std::size_t>(
        std::max(1.0, std::ceil((rep.R - rep.a) / (h_in * static_cast<double>(u.outer_coarsening)))));
    const auto inner_nodes = piecewise_uniform_nodes({-rep.a, 0.0, rep.a}, {n_in / 2, n_in / 2});
    const auto full_nodes =
        piecewise_uniform_nodes({-rep.R, -rep.a, 0.0, rep.a, rep.R}, {n_out, n_in / 2, n_in / 2, n_out});

    const SparsePair sp_d = assemble_mapped(inner, eps, inner_nodes, cfg.grids().nt, BoundaryKind::Dirichlet, ao);
    const SparsePair sp_n = assemble_mapped(inner, eps, inner_nodes, cfg.grids().nt, BoundaryKind::Neumann, ao);
    const SparsePair sp_f = assemble_mapped(full, eps, full_nodes, cfg.grids().nt, BoundaryKind::Dirichlet, ao);
    const Spectrum2D s_d = solve_strip(sp_d, k, so);
    const Spectrum2D s_n = solve_strip(sp_n, k, so);
    const Spectrum2D s_f = solve_strip(sp_f, k, so);

    UnboundedLevel level;
    level.eps = eps;
    level.base_floor = spectral_floor(base, eps);
    level.essential_floor = kPi * kPi / (rep.M_a * rep.M_a * eps * eps);
    level.count_below = count_below(sp_f, level.essential_floor);
    level.count_below_base = count_below(sp_f, level.base_floor);
    level.n_dof_full = sp_f.n_dof();
    rep.levels.push_back(level);

    const Eigen::VectorXd outside = [&] {
      Eigen::VectorXd w(static_cast<Eigen::Index>(sp_f.n_dof()));
      for (std::size_t d = 0; d < sp_f.n_dof(); ++d)
        w[static_cast<Eigen::Index>(d)] = std::abs(sp_f.x_of_dof(d)) > rep.a ? 1.0 : 0.0;
      return w;
    }();
    for (std::size_t j = 0; j < k; ++j) {
      UnboundedRow row;
      row.eps = eps;
      row.j = j + 1;
      row.lambda_dn = s_n.values[j];
      row.lambda_full = s_f.values[j];
      row.lambda_d = s_d.values[j];
      row.below_essential_floor = row.lambda_full < level.essential_floor;
      const double slack = 1e-8 * row.lambda_full;
      row.bracket_ok = row.lambda_dn <= row.lambda_full + slack && row.lambda_full <= row.lambda_d + slack;
      const Eigen::VectorXd v = s_f.vectors.col(static_cast<Eigen::Index>(j));
      const Eigen::VectorXd Mv = sp_f.mass * v;
      row.tail_mass = outside.cwiseProduct(v).dot(Mv) / v.dot(Mv);
      row.residual = std::max({s_d.residuals[j], s_n.residuals[j], s_f.residuals[j]});
      rep.rows.push_back(row);
    }
  }
  return rep;
}

Report unbounded_report(const Config& cfg, const UnboundedReport& u) {
  Report rep;
  rep.command = "unbounded";
  rep.config = config_json(cfg);
  rep.table.columns = {"eps",          "j",          "lambda_dn",   "lambda_full",    "lambda_d",
                       "essential_floor", "below_floor", "bracket_ok", "tail_mass", "residual"};
  bool all_ok = true, floor_ok = true;
  for (const auto& r : u.rows) {
    double ess = kNaN, base = kNaN;
    for (const auto& l : u.levels)
      if (l.eps == r.eps) {
        ess = l.essential_floor;
        base = l.base_floor;
      }
    all_ok = all_ok && r.bracket_ok;
    floor_ok = floor_ok && r.lambda_full >= base && r.lambda_dn >= base && r.lambda_d >= base;
    rep.table.add_row({r.eps, static_cast<std::int64_t>(r.j), r.lambda_dn, r.lambda_full, r.lambda_d, ess,
                       static_cast<std::int64_t>(r.below_essential_floor), static_cast<std::int64_t>(r.bracket_ok),
                       r.tail_mass, r.residual});
  }
  nlohmann::json levels = nlohmann::json::array(), empty = nlohmann::json::array();
  bool counts_monotone = true;
  double max_tail = 0.0;
  for (const auto& r : u.rows)
    if (r.below_essential_floor) max_tail = std::max(max_tail, r.tail_mass);
  for (std::size_t i = 0; i < u.levels.size(); ++i) {
    const auto& l = u.levels[i];
    floor_ok = floor_ok && l.count_below_base == 0;
    if (i > 0 && l.count_below < u.levels[i - 1].count_below) counts_monotone = false;
    if (l.count_below == 0) empty.push_back(l.eps);
    levels.push_back({{"eps", l.eps},
                      {"base_floor", l.base_floor},
                      {"essential_floor", l.essential_floor},
                      {"count_below", l.count_below},
                      {"count_below_base_floor", l.count_below_base},
                      {"n_dof_full", l.n_dof_full}});
  }
  rep.results = {{"a", u.a},
                 {"R", u.R},
                 {"M_a", u.M_a},
                 {"levels", levels},
                 {"count_non_decreasing", counts_monotone},
                 {"no_eigenvalue_below_floor", empty},
                 {"bracketing_holds", all_ok},
                 {"floor_respected", floor_ok},
                 {"tail_mass_limit", kTailMassLimit},
                 {"max_tail_mass", max_tail},
                 {"tail_check_passed", max_tail < kTailMassLimit}};
  return rep;
}

Report run_command(const std::string& command, const Config& cfg, const StripDumps& dumps) {
  LimitCache cache;
  if (command == "limit") return run_limit(cfg, cache);
  if (command == "reduced") return run_reduced(cfg);
  if (command == "strip") return run_strip(cfg, dumps);
  if (command == "sweep") return sweep_report(cfg, run_sweep(cfg, cache));
  if (command == "compare-bc") return run_compare_bc(cfg, cache);
  if (command == "unbounded") return unbounded_report(cfg, run_unbounded(cfg));
  fail(ErrorKind::Config, "unknown command '" + command + "'");
}

} // namespace thinstrip
