#ifndef THINSTRIP_H
#define THINSTRIP_H

/* C interface of the thin-strip eigenvalue toolkit.
 *
 * Handles are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Every fallible call returns a ts_status
 * and leaves a message for ts_last_error() on the calling thread.
 *
 * String outputs use the (buf, cap, needed) convention: *needed receives the
 * size including the terminating NUL. Passing buf == NULL only queries the
 * size; a non-NULL buffer that is too small yields TS_ERR_ARGUMENT and is left
 * untouched.
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(THINSTRIP_BUILDING_LIBRARY)
#    define TS_API __declspec(dllexport)
#  else
#    define TS_API __declspec(dllimport)
#  endif
#else
#  define TS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_ERR_ARGUMENT = 1, /* null handle, bad index, buffer too small */
  TS_ERR_CONFIG = 2,   /* malformed or inconsistent configuration */
  TS_ERR_SOLVER = 3,   /* assembly, eigensolver or truncation failure */
  TS_ERR_IO = 4,       /* unreadable or unwritable path */
  TS_ERR_DOMAIN = 5    /* evaluation outside the profile domain */
} ts_status;

typedef struct ts_config ts_config;
typedef struct ts_report ts_report;
typedef struct ts_profile ts_profile;

typedef struct ts_run_options {
  const char* dump_matrices; /* directory for Matrix Market dumps, or NULL */
  const char* dump_vectors;  /* directory for eigenvector CSV tables, or NULL */
} ts_run_options;

TS_API const char* ts_version(void);
TS_API const char* ts_last_error(void);
TS_API const char* ts_status_name(ts_status status);

/* Configuration */
TS_API ts_status ts_config_load(const char* path, ts_config** out);
TS_API ts_status ts_config_parse(const char* text, ts_config** out);
TS_API ts_status ts_config_set(ts_config* cfg, const char* key, const char* value);
TS_API ts_status ts_config_get(const ts_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
TS_API ts_status ts_config_render(const ts_config* cfg, char* buf, size_t cap, size_t* needed);
TS_API void ts_config_free(ts_config* cfg);

/* Commands: "limit", "reduced", "strip", "sweep", "compare-bc", "unbounded".
 * opts may be NULL. */
TS_API ts_status ts_run(const ts_config* cfg, const char* command, const ts_run_options* opts, ts_report** out);

/* Reports */
TS_API void ts_report_free(ts_report* report);
TS_API size_t ts_report_rows(const ts_report* report);
TS_API size_t ts_report_columns(const ts_report* report);
TS_API const char* ts_report_column_name(const ts_report* report, size_t column);
TS_API ts_status ts_report_number(const ts_report* report, size_t row, const char* column, double* out);
TS_API ts_status ts_report_text(const ts_report* report, size_t row, const char* column, char* buf, size_t cap,
                                size_t* needed);
/* Number of (eps, bc) cells that failed inside a sweep-type command. */
TS_API size_t ts_report_failed_cells(const ts_report* report);
/* format: "csv" (table), "json" (table and summary) or "summary". */
TS_API ts_status ts_report_render(const ts_report* report, const char* format, char* buf, size_t cap,
                                  size_t* needed);
/* "csv" writes path and <stem>.summary.json; "json" writes one document. */
TS_API ts_status ts_report_write(const ts_report* report, const char* format, const char* path);

/* Profiles. field: "height", "height_derivative", "effective_potential",
 * "limit_potential", "transverse_excess", "gradient_term". eps is only used by
 * effective_potential. */
TS_API ts_status ts_profile_from_config(const ts_config* cfg, ts_profile** out);
TS_API ts_status ts_profile_eval(const ts_profile* profile, const char* field, double eps, double x, double* out);
TS_API ts_status ts_profile_alpha(const ts_profile* profile, double* out);
TS_API ts_status ts_profile_floor(const ts_profile* profile, double eps, double* out);
TS_API void ts_profile_free(ts_profile* profile);

#ifdef __cplusplus
}
#endif

#endif /* THINSTRIP_H */
