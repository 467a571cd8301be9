#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddnm/avs.hpp"
#include "ddnm/config.hpp"
#include "ddnm/metrics.hpp"

namespace ddnm {

struct ForecastRow {
  int origin = 0;
  int series = 0;
  int horizon = 0;
  double mean = 0.0;
  std::vector<double> quantiles;
};

struct ModelsSnapshot {
  int origin = 0;
  std::vector<std::map<std::string, double>> per_series;  // key -> probability
};

struct MethodArtifacts {
  std::string method;  // "avs" or "bma"
  std::vector<ForecastRow> forecasts;
  std::vector<std::pair<int, double>> trace;  // origin -> realized joint k-step log density
  std::vector<std::pair<int, std::vector<ModelIndicator>>> representatives;  // per step
  std::vector<ModelsSnapshot> snapshots;
  std::vector<std::string> run_log;
  double wall_seconds = 0.0;
};

struct BacktestResult {
  int fit_start = 0;
  int eval_start = 0;
  int eval_end = 0;
  std::vector<MethodArtifacts> methods;
};

// Derives the shared fit schedule for a config on a panel.
struct Schedule {
  int fit_start = 0;
  int eval_start = 0;  // first forecast origin
  int eval_end = 0;    // last forecast origin
  int last_step = 0;   // last assimilated observation
};
Schedule make_schedule(const RunConfig& cfg, const SeriesPanel& panel);

// Executes the configured backtest (and its BMA twin for mode=both) over the
// evaluation range.  Pure given (panel, config): reruns reproduce results
// bit for bit.
BacktestResult run_backtest(const SeriesPanel& panel, const RunConfig& cfg);

// Writes forecasts.csv, scores.csv, inclusion.csv, models.json and meta.json
// under out_dir (per-method file names for mode=both are recorded in
// meta.json).
void write_bundle(const BacktestResult& result, const RunConfig& cfg, const SeriesPanel& panel,
                  const std::string& out_dir);

// Subcommand bodies shared by the C API / CLI.
void cmd_simulate(const RunConfig& cfg, const std::string& out_path);
void cmd_run(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg, const std::string& run_dir, const std::string& out_dir,
                  const std::string& panel_override);
void cmd_compare(const std::string& scores_a, const std::string& scores_b,
                 const std::string& method_a, const std::string& method_b,
                 const std::string& out_path);

}  // namespace ddnm
