/*
 * C interface to the DDNM forecasting engine.  All functions return a status
 * code (also used as the process exit code by the CLI); on failure
 * ddnm_last_error() holds a thread-local description.  Handles are opaque
 * and must be released with the matching _close call.
 */
#ifndef DDNM_H
#define DDNM_H

#include <stdint.h>

#if defined(_WIN32)
#define DDNM_API __declspec(dllexport)
#else
#define DDNM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  DDNM_OK = 0,
  DDNM_ERR_CONFIG = 2,
  DDNM_ERR_DATA = 3,
  DDNM_ERR_RUNTIME = 4
};

typedef struct ddnm_config ddnm_config;
typedef struct ddnm_panel ddnm_panel;

DDNM_API const char* ddnm_version(void);

/* Message of the most recent failure on this thread ("" if none). */
DDNM_API const char* ddnm_last_error(void);

/* Caps internal parallelism; n < 1 restores the default (hardware
 * concurrency, overridable via the DDNM_THREADS environment variable). */
DDNM_API void ddnm_set_threads(int n);

DDNM_API int ddnm_config_open(const char* path, ddnm_config** out);
DDNM_API int ddnm_config_parse(const char* json_text, ddnm_config** out);

/* Flag-style overrides applied after loading; keys: seed, mode, output_dir. */
DDNM_API int ddnm_config_override(ddnm_config* cfg, const char* key, const char* value);
DDNM_API void ddnm_config_close(ddnm_config* cfg);

/* Loads (or generates) the panel named by the config. */
DDNM_API int ddnm_panel_open(const ddnm_config* cfg, ddnm_panel** out);
DDNM_API int ddnm_panel_dims(const ddnm_panel* panel, int* rows, int* series);
DDNM_API void ddnm_panel_close(ddnm_panel* panel);

/* Generates the synthetic panel and writes it to out_path. */
DDNM_API int ddnm_simulate(const ddnm_config* cfg, const char* out_path);

/* Full backtest; writes the output bundle into the config's output_dir. */
DDNM_API int ddnm_run(const ddnm_config* cfg);

/* Computes rmsfe.csv and trace.csv for a finished run.  panel_override may
 * be NULL to use the config's panel source as actuals. */
DDNM_API int ddnm_evaluate(const ddnm_config* cfg, const char* run_dir, const char* out_dir,
                           const char* panel_override);

/* Joins two scores.csv files on origin and writes per-origin advantages.
 * method_a/method_b may be NULL when a file holds a single method. */
DDNM_API int ddnm_compare(const char* scores_a, const char* scores_b, const char* method_a,
                          const char* method_b, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* DDNM_H */
