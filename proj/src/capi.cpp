#include "ddnm/ddnm.h"

#include <cstdlib>
#include <string>

#include "ddnm/config.hpp"
#include "ddnm/errors.hpp"
#include "ddnm/panel.hpp"
#include "ddnm/parallel.hpp"
#include "ddnm/runner.hpp"

struct ddnm_config {
  ddnm::RunConfig cfg;
};

struct ddnm_panel {
  ddnm::SeriesPanel panel;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps the C++ error taxonomy onto status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DDNM_OK;
  } catch (const ddnm::ConfigError& e) {
    return fail(DDNM_ERR_CONFIG, e.what());
  } catch (const ddnm::DataError& e) {
    return fail(DDNM_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(DDNM_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(DDNM_ERR_RUNTIME, "unknown failure");
  }
}

}  // namespace

extern "C" {

const char* ddnm_version(void) { return "0.1.0"; }

const char* ddnm_last_error(void) { return g_last_error.c_str(); }

void ddnm_set_threads(int n) { ddnm::set_thread_budget(n < 1 ? 0 : n); }

int ddnm_config_open(const char* path, ddnm_config** out) {
  if (!path || !out) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* handle = new ddnm_config{ddnm::RunConfig::from_file(path)};
    *out = handle;
  });
}

int ddnm_config_parse(const char* json_text, ddnm_config** out) {
  if (!json_text || !out) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* handle = new ddnm_config{ddnm::RunConfig::from_json_text(json_text)};
    *out = handle;
  });
}

int ddnm_config_override(ddnm_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    const std::string k = key;
    if (k == "seed")
      cfg->cfg.seed = std::strtoull(value, nullptr, 10);
    else if (k == "mode")
      cfg->cfg.mode = value;
    else if (k == "output_dir")
      cfg->cfg.output_dir = value;
    else
      throw ddnm::ConfigError("unknown override key '" + k + "'");
  });
}

void ddnm_config_close(ddnm_config* cfg) { delete cfg; }

int ddnm_panel_open(const ddnm_config* cfg, ddnm_panel** out) {
  if (!cfg || !out) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    auto* handle = new ddnm_panel{cfg->cfg.load_data()};
    *out = handle;
  });
}

int ddnm_panel_dims(const ddnm_panel* panel, int* rows, int* series) {
  if (!panel) return fail(DDNM_ERR_DATA, "null panel");
  if (rows) *rows = panel->panel.rows();
  if (series) *series = panel->panel.series_count();
  return DDNM_OK;
}

void ddnm_panel_close(ddnm_panel* panel) { delete panel; }

int ddnm_simulate(const ddnm_config* cfg, const char* out_path) {
  if (!cfg || !out_path) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] { ddnm::cmd_simulate(cfg->cfg, out_path); });
}

int ddnm_run(const ddnm_config* cfg) {
  if (!cfg) return fail(DDNM_ERR_CONFIG, "null config");
  return guarded([&] { ddnm::cmd_run(cfg->cfg); });
}

int ddnm_evaluate(const ddnm_config* cfg, const char* run_dir, const char* out_dir,
                  const char* panel_override) {
  if (!cfg || !run_dir || !out_dir) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    ddnm::cmd_evaluate(cfg->cfg, run_dir, out_dir, panel_override ? panel_override : "");
  });
}

int ddnm_compare(const char* scores_a, const char* scores_b, const char* method_a,
                 const char* method_b, const char* out_path) {
  if (!scores_a || !scores_b || !out_path) return fail(DDNM_ERR_CONFIG, "null argument");
  return guarded([&] {
    ddnm::cmd_compare(scores_a, scores_b, method_a ? method_a : "", method_b ? method_b : "",
                      out_path);
  });
}

}  // extern "C"
