// Independent brute-force oracles used only by tests.  Each one deliberately
// avoids the engine code path it validates: the batch posterior is direct
// matrix algebra, model-space enumeration walks bit patterns, quadrature is
// plain Simpson, and the refit scorer is a naive filtering loop that never
// touches ScoreLedger.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddnm/dlm.hpp"
#include "ddnm/model_space.hpp"
#include "ddnm/panel.hpp"
#include "ddnm/scoring.hpp"

namespace ddnm::oracle {

struct NormalGamma {
  Eigen::VectorXd m;
  Eigen::MatrixXd C;  // data-scale, as in the engine convention
  double n = 1.0;
  double s = 1.0;
};

// Closed-form batch conjugate posterior for y = X theta + eps under the
// normal-gamma prior (theta | lambda ~ N(m, C/(s lambda)), lambda ~
// Ga(n/2, ns/2)); numerically naive on purpose.
NormalGamma batch_conjugate_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const NormalGamma& prior);

// Every model over the pool's free entries (forced bits always on).
// Guards p_free <= 12.
std::vector<ModelIndicator> enumerate_models(const CandidatePool& pool);

// Composite Simpson on [a, b] with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Expected squared error of the random-walk forecast y_hat(t+h) = y_t under a
// stationary AR(1) with coefficient phi and innovation sd sigma.
double ar1_rw_expected_msfe(double phi, double sigma, int h);

// From-scratch alpha-discounted cumulative one-step log predictive score of
// one model, filtering from fit_start (initial state = posterior at
// fit_start-1) through t_end inclusive.
double refit_onestep_score(const CandidatePool& pool, const ModelIndicator& model,
                           const SeriesPanel& panel, const PriorSpec& prior,
                           const dlm::Discounts& disc, int fit_start, int t_end, double alpha);

// Pass/fail record for the acceptance harness.
struct OracleReport {
  std::string case_id;
  double oracle_value = 0.0;
  double engine_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

OracleReport check_close(const std::string& case_id, double oracle_value, double engine_value,
                         double tolerance);

}  // namespace ddnm::oracle
