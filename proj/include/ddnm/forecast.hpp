#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddnm/dlm.hpp"
#include "ddnm/model_space.hpp"
#include "ddnm/panel.hpp"

namespace ddnm {

// One candidate model of one series with its weight and fitted state.
struct SeriesModelState {
  ModelIndicator model;
  double probability = 1.0;
  dlm::Posterior state;
};

struct SeriesState {
  CandidatePool pool;
  dlm::Discounts discounts;
  std::vector<SeriesModelState> models;  // probabilities sum to 1
};

// Frozen cross-section of the DDNM at a forecast origin.  Series are held in
// model order: parents of series j are the series with larger index, so
// simulation walks indices m-1 down to 0.
struct DdnmState {
  std::vector<SeriesState> series;
  int origin_time = 0;  // fitted through this panel row
};

// Monte Carlo draws of the next k steps of all m series ("synthetic
// futures"), sample-major then horizon then series.
struct PathSamples {
  int origin_time = 0;
  int horizon = 0;
  int n_samples = 0;
  int m = 0;
  std::vector<double> draws;  // size n_samples * horizon * m

  double at(int sample, int h, int j) const {
    return draws[(static_cast<std::size_t>(sample) * horizon + h) * m + j];
  }
};

// Joint 1-step log density by composition: the sum over series (walked in
// reverse order, so parental values come from y_t itself) of conditional
// Student-T log predictives.  Each series must carry exactly one model.
double joint_one_step_logdensity(const DdnmState& state, const SeriesPanel& panel, int t,
                                 const Eigen::VectorXd& y_t);

// Simulates k-step paths under one joint model (every series holds a single
// model).  States and volatilities evolve by the discount random walk and
// beta-shock laws; lagged predictors beyond the observed history use
// previously simulated values.  Throws DataError when a required future
// exogenous value is missing.
PathSamples simulate_paths(const DdnmState& state, const SeriesPanel& panel, int k, int n_samples,
                           std::uint64_t rng_stream);

// Mixture version: each sample first draws one model per series from the
// per-series probabilities, then simulates one path under that joint model.
PathSamples model_averaged_paths(const DdnmState& state, const SeriesPanel& panel, int k,
                                 int n_samples, std::uint64_t rng_stream);

// Monte Carlo log path density of an observed k x m path: latent (theta,
// lambda) paths are propagated as in simulate_paths, and the conditional
// normal densities of the observed values are averaged (log-sum-exp).
// Returns {log estimate, delta-method standard error}; the standard error is
// reported as 0 for n_samples = 1.
struct McLogDensity {
  double log_density = 0.0;
  double standard_error = 0.0;
};
McLogDensity mc_path_logdensity(const DdnmState& state, const SeriesPanel& panel,
                                const Eigen::MatrixXd& observed_path, int n_samples,
                                std::uint64_t rng_stream);

// Empirical per-(horizon, series) means and type-7 interpolated quantiles.
struct SummaryRow {
  int horizon = 0;
  int series = 0;
  double mean = 0.0;
  std::vector<double> quantiles;
};
std::vector<SummaryRow> summarize(const PathSamples& paths, const std::vector<double>& quantiles);

}  // namespace ddnm
