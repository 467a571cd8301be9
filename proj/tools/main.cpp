// ddnm command line: simulate | run | evaluate | compare.
// Talks to the engine through the shared-library C API only.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "ddnm/ddnm.h"

namespace {

int report(int code) {
  if (code != DDNM_OK) std::fprintf(stderr, "ddnm: error: %s\n", ddnm_last_error());
  return code;
}

struct ConfigHandle {
  ddnm_config* cfg = nullptr;
  ~ConfigHandle() { ddnm_config_close(cfg); }
};

int open_config(const std::string& path, const std::string& seed, const std::string& mode,
                const std::string& out_dir, ConfigHandle& handle) {
  int rc = ddnm_config_open(path.c_str(), &handle.cfg);
  if (rc != DDNM_OK) return rc;
  if (!seed.empty()) rc = ddnm_config_override(handle.cfg, "seed", seed.c_str());
  if (rc == DDNM_OK && !mode.empty()) rc = ddnm_config_override(handle.cfg, "mode", mode.c_str());
  if (rc == DDNM_OK && !out_dir.empty())
    rc = ddnm_config_override(handle.cfg, "output_dir", out_dir.c_str());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential Bayesian forecasting for multivariate time series (DDNM + AVS)"};
  app.require_subcommand(1);

  std::string config_path, seed, mode, out_dir, out_path, run_dir, panel_path;
  std::string scores_a, scores_b, method_a, method_b;
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (also: DDNM_THREADS)");

  auto* sim = app.add_subcommand("simulate", "generate the synthetic panel and write it");
  sim->add_option("--config", config_path, "run config (JSON)")->required();
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", out_path, "output panel file")->default_val("panel.csv");

  auto* run = app.add_subcommand("run", "run the configured backtest and write the bundle");
  run->add_option("--config", config_path, "run config (JSON)")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--mode", mode, "avs | bma | both");
  run->add_option("--out", out_dir, "override the output directory");

  auto* eval = app.add_subcommand("evaluate", "compute rmsfe.csv and trace.csv for a run");
  eval->add_option("--config", config_path, "run config (JSON)")->required();
  eval->add_option("--run", run_dir, "run output directory")->required();
  eval->add_option("--out", out_dir, "metrics output directory");
  eval->add_option("--panel", panel_path, "actuals panel override");

  auto* cmp = app.add_subcommand("compare", "per-origin advantage of one scores.csv over another");
  cmp->add_option("--a", scores_a, "first scores.csv")->required();
  cmp->add_option("--b", scores_b, "second scores.csv")->required();
  cmp->add_option("--method-a", method_a, "method to take from the first file");
  cmp->add_option("--method-b", method_b, "method to take from the second file");
  cmp->add_option("--out", out_path, "output file")->default_val("compare.csv");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) ddnm_set_threads(threads);

  if (sim->parsed()) {
    ConfigHandle h;
    int rc = open_config(config_path, seed, "", "", h);
    if (rc == DDNM_OK) rc = ddnm_simulate(h.cfg, out_path.c_str());
    return report(rc);
  }
  if (run->parsed()) {
    ConfigHandle h;
    int rc = open_config(config_path, seed, mode, out_dir, h);
    if (rc == DDNM_OK) rc = ddnm_run(h.cfg);
    return report(rc);
  }
  if (eval->parsed()) {
    ConfigHandle h;
    int rc = open_config(config_path, "", "", "", h);
    if (rc == DDNM_OK) {
      const std::string dest = out_dir.empty() ? run_dir : out_dir;
      rc = ddnm_evaluate(h.cfg, run_dir.c_str(), dest.c_str(),
                         panel_path.empty() ? nullptr : panel_path.c_str());
    }
    return report(rc);
  }
  if (cmp->parsed()) {
    int rc = ddnm_compare(scores_a.c_str(), scores_b.c_str(),
                          method_a.empty() ? nullptr : method_a.c_str(),
                          method_b.empty() ? nullptr : method_b.c_str(), out_path.c_str());
    return report(rc);
  }
  return 0;
}
