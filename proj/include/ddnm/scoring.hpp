#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddnm/dlm.hpp"
#include "ddnm/model_space.hpp"
#include "ddnm/panel.hpp"

namespace ddnm {

enum class ScoreKind { OneStep, KStepMarginal, PathLpfd };

ScoreKind score_kind_from_string(const std::string& s);
std::string to_string(ScoreKind k);

struct ScoreConfig {
  ScoreKind kind = ScoreKind::OneStep;
  int k = 1;               // horizon; must be 1 for OneStep
  double alpha = 1.0;      // score discount in (0, 1]
  double tau = 1.0;        // Gibbs scale > 0
  int window_start = 0;    // earliest time used in backfit (0 = full history)
  int raw_history = 1024;  // ring cap on stored per-time raw increments

  void check() const;
};

// Baseline model prior p(M | D_0): uniform over tracked models, or
// independent Bernoulli(pi) over the free entries.
struct ModelPrior {
  bool bernoulli = false;
  double pi = 0.5;

  double log_prior(const ModelIndicator& m, const CandidatePool& pool) const;
};

// Diagonal conjugate prior over a pool's entries.  A model's starting state
// takes the sub-block for its included entries; the full-pool diagonal is
// fixed per (series, pool, data) so that a model fitted late is bit-identical
// to one tracked from the start.
struct PriorSpec {
  Eigen::VectorXd scale_diag;  // per-entry prior scale (data scale)
  double n0 = 1.0;
  double s0 = 1.0;

  dlm::Posterior initial_state(const ModelIndicator& m) const;
};

// Unit-information-style construction: intercept scale g*s0, other entries
// g*s0/var(entry values over the calibration window starting at fit_start).
PriorSpec make_prior_spec(const CandidatePool& pool, const SeriesPanel& panel, int fit_start,
                          double g, double n0, double s0_override, int calib_length);

struct LedgerEntry {
  ModelIndicator model;
  double score = 0.0;
  int increments = 0;
  int last_updated = -1;
  dlm::Posterior state;  // filtered through last_updated
  // posteriors at the last k+1 times, oldest first; feeds the k-step score
  std::deque<std::pair<int, dlm::Posterior>> state_history;
  std::deque<double> onestep_window;          // last <= k one-step log densities
  std::deque<std::pair<int, double>> raw;     // (time, raw increment), capped ring
};

// Per-series score ledger over the tracked candidate models.  All entries
// share one fit schedule: filtering starts at fit_start (the initial prior
// acts as the posterior at fit_start-1) and score increments begin at
// fit_start + k - 1, so the three kinds coincide exactly at k = 1.
class ScoreLedger {
 public:
  ScoreLedger() = default;
  ScoreLedger(ScoreConfig cfg, CandidatePool pool, dlm::Discounts disc, PriorSpec prior,
              int fit_start);

  // Assimilates y at time t (= clock()+1) into every tracked model and adds
  // the per-kind score increment.  Throws DataError when required values
  // are missing.
  void advance(const SeriesPanel& panel, int t);

  // Inserts a model before any data has been assimilated (cold start).
  const LedgerEntry& track_initial(const ModelIndicator& model);

  // Fits `model` from fit_start through clock(), reproducing the discounted
  // score exactly as if it had been tracked from the start, and inserts it.
  // Throws DataError when the fit window is shorter than the score horizon.
  const LedgerEntry& backfill(const ModelIndicator& model, const SeriesPanel& panel);

  // Lookup-or-backfill used by the search loop.
  const LedgerEntry& ensure(const ModelIndicator& model, const SeriesPanel& panel);

  // backfill split into a pure fit (safe to run concurrently) and a
  // serialized insertion.
  LedgerEntry fit_detached(const ModelIndicator& model, const SeriesPanel& panel) const;
  const LedgerEntry& insert(LedgerEntry entry);

  bool tracked(const std::string& key) const { return entries_.count(key) > 0; }
  const LedgerEntry& at(const std::string& key) const { return entries_.at(key); }
  const std::map<std::string, LedgerEntry>& entries() const { return entries_; }
  void prune(const std::vector<std::string>& keep);

  int clock() const { return clock_; }
  int fit_start() const { return fit_start_; }
  int first_increment_time() const { return fit_start_ + cfg_.k - 1; }
  bool has_increments() const;
  const ScoreConfig& config() const { return cfg_; }
  const CandidatePool& pool() const { return pool_; }
  const dlm::Discounts& discounts() const { return disc_; }
  const PriorSpec& prior_spec() const { return prior_; }

  // Re-derives the discounted sum from the stored raw increments under a
  // different discount (usable while the ring still covers the history).
  double rescore(const std::string& key, double alpha) const;

 private:
  void step_entry(LedgerEntry& e, const SeriesPanel& panel, int t) const;

  ScoreConfig cfg_;
  CandidatePool pool_;
  dlm::Discounts disc_;
  PriorSpec prior_;
  int fit_start_ = 0;
  int clock_ = -1;
  std::map<std::string, LedgerEntry> entries_;
};

// Core of Eq.-style generalized-Bayes weighting:
// p(M) ~ exp(log_prior(M) + tau * (s(M) - max s)), normalized to 1.
std::map<std::string, double> gibbs_from_scores(
    const std::map<std::string, double>& scores,
    const std::function<double(const std::string&)>& log_prior, double tau);

// Gibbs model probabilities over the ledger's tracked models.  Models
// without any score increment are excluded from the normalization; if none
// has one yet the baseline prior over tracked models is returned.
std::map<std::string, double> gibbs_probabilities(const ScoreLedger& ledger,
                                                  const ModelPrior& prior, double tau);

// Discount-modified Bayesian model probabilities (one-step kind):
// p(M | D_t) ~ p(M | D_0)^(alpha^t) * prod_h p(y_h | M, D_{h-1})^(alpha^(t-h)).
// Implemented on the alpha-discounted one-step ledger; coincides with
// gibbs_probabilities at tau = 1 under a uniform baseline prior.
std::map<std::string, double> bma_probabilities(const ScoreLedger& ledger,
                                                const ModelPrior& prior, double alpha);

// Joint DDNM model probabilities as the product of per-series probabilities,
// held implicitly (the product space is never materialized).
class RecoupledProbabilities {
 public:
  explicit RecoupledProbabilities(std::vector<std::map<std::string, double>> per_series)
      : per_series_(std::move(per_series)) {}

  std::size_t series_count() const { return per_series_.size(); }
  const std::map<std::string, double>& series(std::size_t j) const { return per_series_[j]; }

  // Probability of one joint model (one key per series).
  double joint_probability(const std::vector<std::string>& keys) const;

  // Joint argmax = the per-series argmaxes (product structure).  Ties break
  // toward fewer included predictors, then canonical bit order.
  std::vector<std::string> argmax() const;

 private:
  std::vector<std::map<std::string, double>> per_series_;
};

RecoupledProbabilities recouple(std::vector<std::map<std::string, double>> per_series);

// Shared tie-break: highest probability, then fewest included predictors,
// then lexicographically smallest canonical key.
std::string argmax_key(const std::map<std::string, double>& probs);

}  // namespace ddnm
