#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddnm/forecast.hpp"
#include "ddnm/scoring.hpp"
#include "ddnm/sss.hpp"

namespace ddnm {

struct AvsConfig {
  ScoreConfig score;
  ModelPrior model_prior;
  SssConfig sss;
  int avs_every = 1;      // run search/reweighting every n-th step
  int forecast_k = 1;     // emitted forecast horizon
  int mc_samples = 5000;  // path samples per forecast origin
  std::vector<double> quantiles = {0.025, 0.25, 0.5, 0.75, 0.975};
  std::uint64_t seed = 0;
  bool emit_paths = true;

  void check() const;
};

// Per-series argmax under the product recoupling; ties break toward fewer
// predictors then canonical key.
std::vector<ModelIndicator> select_representative(
    const std::vector<std::map<std::string, double>>& per_series_probs);

// A model-averaged analytic k-step density frozen at its origin: one evolved
// prior per weighted model, evaluated once the target observation arrives.
struct PendingComponent {
  double weight = 0.0;
  ModelIndicator model;
  dlm::Prior prior;
};
struct PendingDensity {
  int target = 0;
  int horizon = 0;
  std::vector<PendingComponent> components;
};

// The whole mutable loop state; copyable so a failed step can roll back.
struct AvsRunState {
  int clock = 0;  // next time index to process
  std::vector<ScoreLedger> ledgers;
  std::vector<ModelIndicator> representative;
  std::vector<std::map<std::string, double>> probabilities;  // last computed weights
  std::vector<std::deque<PendingDensity>> pending;           // per series
  std::vector<std::pair<int, std::vector<ModelIndicator>>> representative_history;
  std::vector<std::string> run_log;
};

struct StepResult {
  int time = 0;    // observation assimilated by this step
  int origin = 0;  // forecast origin (= time - 1)
  bool searched = false;
  bool emitted = false;
  std::vector<SummaryRow> path_summary;  // per (horizon, series) when emitted
  // forecast weights at the origin, keyed like models.json
  std::vector<std::map<std::string, double>> origin_probabilities;
  // realized joint one-step log density log p(y_t | D_{t-1}), model-averaged
  std::optional<double> one_step_logdensity;
  // realized joint k-step density completed by this observation: (origin, value)
  std::optional<std::pair<int, double>> kstep_trace;
};

// Algorithm loop: per-series SSS + Gibbs weights, model-averaged forecast
// emission, observation assimilation, and representative selection, with
// scheduling via avs_every.  A step that throws leaves the state unchanged.
class AvsEngine {
 public:
  AvsEngine(const SeriesPanel& panel, std::vector<CandidatePool> pools,
            std::vector<dlm::Discounts> discounts, std::vector<PriorSpec> priors,
            AvsConfig cfg, int fit_start);

  // Convenience constructor deriving prior specs from the data.
  static AvsEngine make(const SeriesPanel& panel, std::vector<CandidatePool> pools,
                        std::vector<dlm::Discounts> discounts, const AvsConfig& cfg,
                        int fit_start, double prior_g, double prior_n0, double prior_s0,
                        int calib_length);

  // search_allowed lets the driver switch the model search off for steps
  // past the last forecast origin, where only assimilation still matters.
  StepResult step(int t, bool emit_forecasts, bool search_allowed = true);

  const AvsRunState& state() const { return state_; }
  int fit_start() const { return fit_start_; }
  int series_count() const { return static_cast<int>(state_.ledgers.size()); }
  const AvsConfig& config() const { return cfg_; }

  // Frozen forecast-ready view of the current state under the given weights.
  DdnmState forecast_state(const std::vector<std::map<std::string, double>>& probs) const;

 private:
  bool active_at(int t) const;
  bool searchable() const;
  std::vector<std::map<std::string, double>> current_weights(bool reweight) const;
  void push_pending(int origin, int horizon,
                    const std::vector<std::map<std::string, double>>& probs);
  std::optional<double> settle_pending(int t, int horizon);

  const SeriesPanel& panel_;
  AvsConfig cfg_;
  int fit_start_ = 0;
  AvsRunState state_;
};

}  // namespace ddnm
