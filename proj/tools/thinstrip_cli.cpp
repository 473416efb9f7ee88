// Command-line front end. Talks to the toolkit through the C interface only.

#include "thinstrip/thinstrip.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config;
  std::string eps;
  int jmax = 0;
  std::string out;
  std::string format;
  bool dense_oracle = false;
  std::string dump_matrices;
  std::string dump_vectors;
};

int exit_code(ts_status s) {
  switch (s) {
  case TS_OK: return 0;
  case TS_ERR_ARGUMENT:
  case TS_ERR_CONFIG: return 2;
  case TS_ERR_SOLVER:
  case TS_ERR_DOMAIN: return 3;
  case TS_ERR_IO: return 4;
  }
  return 3;
}

int report_failure(ts_status s, const std::string& what) {
  std::cerr << "thinstrip: " << what << ": " << ts_status_name(s) << ": " << ts_last_error() << '\n';
  return exit_code(s);
}

std::string config_value(const ts_config* cfg, const char* key) {
  size_t needed = 0;
  if (ts_config_get(cfg, key, nullptr, 0, &needed) != TS_OK) return {};
  std::string s(needed, '\0');
  ts_config_get(cfg, key, s.data(), s.size(), &needed);
  s.resize(needed - 1);
  return s;
}

int run(const std::string& command, const Overrides& o) {
  ts_config* raw = nullptr;
  if (ts_status s = ts_config_load(o.config.c_str(), &raw); s != TS_OK) return report_failure(s, "loading config");
  std::unique_ptr<ts_config, decltype(&ts_config_free)> cfg(raw, ts_config_free);

  std::vector<std::pair<std::string, std::string>> sets;
  if (!o.eps.empty()) sets.emplace_back("sweep.eps", o.eps);
  if (o.jmax != 0) sets.emplace_back("sweep.jmax", std::to_string(o.jmax));
  if (!o.out.empty()) sets.emplace_back("output.path", o.out);
  if (!o.format.empty()) sets.emplace_back("output.format", o.format);
  if (o.dense_oracle) sets.emplace_back("sweep.dense_oracle", "true");
  for (const auto& [k, v] : sets)
    if (ts_status s = ts_config_set(cfg.get(), k.c_str(), v.c_str()); s != TS_OK)
      return report_failure(s, "applying --" + k.substr(k.find('.') + 1));

  ts_run_options opts{o.dump_matrices.empty() ? nullptr : o.dump_matrices.c_str(),
                      o.dump_vectors.empty() ? nullptr : o.dump_vectors.c_str()};
  ts_report* rep_raw = nullptr;
  if (ts_status s = ts_run(cfg.get(), command.c_str(), &opts, &rep_raw); s != TS_OK)
    return report_failure(s, command);
  std::unique_ptr<ts_report, decltype(&ts_report_free)> rep(rep_raw, ts_report_free);

  const std::string format = config_value(cfg.get(), "output.format");
  const std::string path = config_value(cfg.get(), "output.path");
  if (path.empty()) {
    size_t needed = 0;
    ts_report_render(rep.get(), format.c_str(), nullptr, 0, &needed);
    std::string text(needed, '\0');
    if (ts_status s = ts_report_render(rep.get(), format.c_str(), text.data(), text.size(), &needed); s != TS_OK)
      return report_failure(s, "rendering report");
    std::fwrite(text.data(), 1, needed - 1, stdout);
  } else if (ts_status s = ts_report_write(rep.get(), format.c_str(), path.c_str()); s != TS_OK) {
    return report_failure(s, "writing report");
  }

  if (const size_t failed = ts_report_failed_cells(rep.get()); failed > 0) {
    std::cerr << "thinstrip: " << failed << " sweep cell(s) failed; see failed_cells in the summary\n";
    return 3;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues of the Dirichlet Laplacian on thin strips"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ts_version()));

  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"limit", "lowest eigenvalues of the limit operator -d2/dx2 + q"},
      {"reduced", "lowest eigenvalues of the reduced 1D operator"},
      {"strip", "lowest eigenvalues of the 2D strip"},
      {"sweep", "convergence sweep over eps and boundary conditions"},
      {"compare-bc", "D versus DN comparison over eps"},
      {"unbounded", "bracketing experiment on a truncated unbounded strip"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--eps", o.eps, "comma-separated eps list, strictly decreasing");
    sub->add_option("--jmax", o.jmax, "number of eigenvalues")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output path (default: standard output)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--dense-oracle", o.dense_oracle, "use the dense tridiagonal solver for 1D problems");
    if (name == "strip") {
      sub->add_option("--dump-matrices", o.dump_matrices, "directory for stiffness/mass Matrix Market files");
      sub->add_option("--dump-vectors", o.dump_vectors, "directory for eigenvector CSV tables");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto& [name, help] : commands)
    if (app.got_subcommand(name)) return run(name, o);
  return 2;
}
