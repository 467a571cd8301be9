#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddnm/avs.hpp"
#include "ddnm/data_io.hpp"
#include "ddnm/dlm.hpp"

namespace ddnm {

// Per-series candidate pool specification, expanded into a CandidatePool in
// the fixed canonical order: intercept, lags grouped by source series in
// model order (each list ascending), parents in model order, then exogenous
// columns in the declared order.
struct PoolSpec {
  std::string series;
  bool intercept = true;
  std::map<std::string, std::vector<int>> lags;  // source series -> lag list
  std::vector<std::string> parents;              // series ordered after the owner
  std::vector<std::string> exogenous;
  std::vector<std::string> forced = {"intercept"};  // entry ids
  int max_size = 0;
};

struct RunConfig {
  // panel source: exactly one of a delimited file or the synthetic generator
  std::string panel_path;
  PanelSchema schema;
  std::string future_exogenous_path;
  std::optional<SyntheticConfig> synthetic;

  std::vector<std::string> series_order;  // defaults to schema.series
  std::vector<PoolSpec> pools;            // one per series, aligned to series_order

  dlm::Discounts default_discounts{0.98, 0.98};
  std::map<std::string, dlm::Discounts> series_discounts;

  double prior_g = 1.0;
  double prior_n0 = 1.0;
  double prior_s0 = 0.0;  // 0 = derive from the calibration window
  int prior_calib = 30;

  ScoreConfig score;
  ModelPrior model_prior;
  SssConfig sss;
  int avs_every = 1;
  int training_length = 30;
  std::optional<int> eval_start;  // panel row indices
  std::optional<int> eval_end;

  int forecast_k = 0;  // 0 = follow score.k
  int mc_samples = 5000;
  std::vector<double> quantiles = {0.025, 0.25, 0.5, 0.75, 0.975};

  std::uint64_t seed = 0;
  std::string mode = "avs";  // avs | bma | both
  std::string output_dir = "out";

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  void validate() const;

  int resolved_forecast_k() const { return forecast_k > 0 ? forecast_k : score.k; }

  // Loads or generates the panel named by this config.
  SeriesPanel load_data() const;

  CandidatePool build_pool(std::size_t series_index) const;
  std::vector<CandidatePool> build_pools() const;
  std::vector<dlm::Discounts> build_discounts() const;

  // Score configuration of the discounted-BMA baseline run on the same data.
  ScoreConfig bma_score() const;
};

}  // namespace ddnm
