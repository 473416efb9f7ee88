#include "thinstrip/thinstrip.h"

#include "thinstrip/config.hpp"
#include "thinstrip/error.hpp"
#include "thinstrip/harness.hpp"
#include "thinstrip/profile.hpp"
#include "thinstrip/report.hpp"

#include <cstring>
#include <new>
#include <string>

struct ts_config {
  thinstrip::Config cfg;
};

struct ts_report {
  thinstrip::Report report;
};

struct ts_profile {
  thinstrip::Profile profile;
};

namespace {

thread_local std::string last_error;

ts_status set_error(ts_status status, const std::string& message) {
  last_error = message;
  return status;
}

ts_status status_of(thinstrip::ErrorKind kind) {
  using thinstrip::ErrorKind;
  switch (kind) {
  case ErrorKind::Config: return TS_ERR_CONFIG;
  case ErrorKind::Parameter: return TS_ERR_ARGUMENT;
  case ErrorKind::Domain:
  case ErrorKind::Kink: return TS_ERR_DOMAIN;
  case ErrorKind::Io: return TS_ERR_IO;
  case ErrorKind::Assembly:
  case ErrorKind::Numeric:
  case ErrorKind::Truncation: return TS_ERR_SOLVER;
  case ErrorKind::Index: return TS_ERR_ARGUMENT;
  }
  return TS_ERR_SOLVER;
}

// Runs f, translating exceptions into status codes.
template <class F>
ts_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const thinstrip::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TS_ERR_SOLVER, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TS_ERR_SOLVER, e.what());
  }
}

ts_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return TS_OK;
  if (cap < s.size() + 1) return set_error(TS_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return TS_OK;
}

ts_status null_argument(const char* what) { return set_error(TS_ERR_ARGUMENT, std::string(what) + " is null"); }

} // namespace

extern "C" {

const char* ts_version(void) { return "1.0.0"; }

const char* ts_last_error(void) { return last_error.c_str(); }

const char* ts_status_name(ts_status status) {
  switch (status) {
  case TS_OK: return "ok";
  case TS_ERR_ARGUMENT: return "argument error";
  case TS_ERR_CONFIG: return "config error";
  case TS_ERR_SOLVER: return "solver error";
  case TS_ERR_IO: return "i/o error";
  case TS_ERR_DOMAIN: return "domain error";
  }
  return "unknown status";
}

ts_status ts_config_load(const char* path, ts_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ts_config{thinstrip::Config::load(path)};
    return TS_OK;
  });
}

ts_status ts_config_parse(const char* text, ts_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ts_config{thinstrip::Config::parse(text)};
    return TS_OK;
  });
}

ts_status ts_config_set(ts_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("config");
  if (!key || !value) return null_argument("key or value");
  return guarded([&] {
    cfg->cfg.set(key, value);
    return TS_OK;
  });
}

ts_status ts_config_get(const ts_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_argument("config");
  if (!key) return null_argument("key");
  return guarded([&] {
    const std::string k = key;
    const auto dot = k.find('.');
    const auto& snap = cfg->cfg.snapshot();
    if (dot != std::string::npos) {
      const auto s = snap.find(k.substr(0, dot));
      if (s != snap.end()) {
        const auto v = s->second.find(k.substr(dot + 1));
        if (v != s->second.end()) return copy_out(v->second, buf, cap, needed);
      }
    }
    return set_error(TS_ERR_ARGUMENT, "no config key " + k);
  });
}

ts_status ts_config_render(const ts_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_argument("config");
  return guarded([&] { return copy_out(cfg->cfg.to_ini(), buf, cap, needed); });
}

void ts_config_free(ts_config* cfg) { delete cfg; }

ts_status ts_run(const ts_config* cfg, const char* command, const ts_run_options* opts, ts_report** out) {
  if (!cfg) return null_argument("config");
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    thinstrip::StripDumps dumps;
    if (opts && opts->dump_matrices) dumps.matrices = opts->dump_matrices;
    if (opts && opts->dump_vectors) dumps.vectors = opts->dump_vectors;
    *out = new ts_report{thinstrip::run_command(command, cfg->cfg, dumps)};
    return TS_OK;
  });
}

void ts_report_free(ts_report* report) { delete report; }

size_t ts_report_rows(const ts_report* report) { return report ? report->report.table.rows.size() : 0; }

size_t ts_report_columns(const ts_report* report) { return report ? report->report.table.columns.size() : 0; }

const char* ts_report_column_name(const ts_report* report, size_t column) {
  if (!report || column >= report->report.table.columns.size()) {
    set_error(TS_ERR_ARGUMENT, "column index out of range");
    return nullptr;
  }
  return report->report.table.columns[column].c_str();
}

ts_status ts_report_number(const ts_report* report, size_t row, const char* column, double* out) {
  if (!report) return null_argument("report");
  if (!column || !out) return null_argument("column or out");
  return guarded([&] {
    *out = report->report.table.number(row, column);
    return TS_OK;
  });
}

ts_status ts_report_text(const ts_report* report, size_t row, const char* column, char* buf, size_t cap,
                         size_t* needed) {
  if (!report) return null_argument("report");
  if (!column) return null_argument("column");
  return guarded([&] { return copy_out(report->report.table.text(row, column), buf, cap, needed); });
}

size_t ts_report_failed_cells(const ts_report* report) {
  if (!report) return 0;
  const auto& r = report->report.results;
  return r.contains("failed_cells") ? r["failed_cells"].size() : 0;
}

ts_status ts_report_render(const ts_report* report, const char* format, char* buf, size_t cap, size_t* needed) {
  if (!report) return null_argument("report");
  if (!format) return null_argument("format");
  return guarded([&] {
    const std::string f = format;
    if (f == "csv") return copy_out(thinstrip::render_csv(report->report.table), buf, cap, needed);
    if (f == "json") return copy_out(thinstrip::render_json(report->report), buf, cap, needed);
    if (f == "summary") return copy_out(thinstrip::summary_document(report->report).dump(2) + '\n', buf, cap, needed);
    return set_error(TS_ERR_ARGUMENT, "unknown format " + f);
  });
}

ts_status ts_report_write(const ts_report* report, const char* format, const char* path) {
  if (!report) return null_argument("report");
  if (!format || !path) return null_argument("format or path");
  return guarded([&] {
    thinstrip::emit_report(report->report, format, path);
    return TS_OK;
  });
}

ts_status ts_profile_from_config(const ts_config* cfg, ts_profile** out) {
  if (!cfg) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ts_profile{cfg->cfg.profile()};
    return TS_OK;
  });
}

ts_status ts_profile_eval(const ts_profile* profile, const char* field, double eps, double x, double* out) {
  if (!profile) return null_argument("profile");
  if (!field || !out) return null_argument("field or out");
  return guarded([&] {
    const std::string f = field;
    const auto& p = profile->profile;
    if (f == "height") *out = thinstrip::height(p, x);
    else if (f == "height_derivative") *out = thinstrip::height_derivative(p, x);
    else if (f == "effective_potential") *out = thinstrip::effective_potential(p, eps, x);
    else if (f == "limit_potential") *out = thinstrip::limit_potential(p, x);
    else if (f == "transverse_excess") *out = thinstrip::transverse_excess(p, x);
    else if (f == "gradient_term") *out = thinstrip::gradient_term(p, x);
    else return set_error(TS_ERR_ARGUMENT, "unknown profile field " + f);
    return TS_OK;
  });
}

ts_status ts_profile_alpha(const ts_profile* profile, double* out) {
  if (!profile || !out) return null_argument("profile or out");
  return guarded([&] {
    *out = thinstrip::alpha(profile->profile);
    return TS_OK;
  });
}

ts_status ts_profile_floor(const ts_profile* profile, double eps, double* out) {
  if (!profile || !out) return null_argument("profile or out");
  return guarded([&] {
    *out = thinstrip::spectral_floor(profile->profile, eps);
    return TS_OK;
  });
}

void ts_profile_free(ts_profile* profile) { delete profile; }

} // extern "C"
