#pragma once

#include <Eigen/Dense>

namespace ddnm::dlm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Discount factors for the random-walk state evolution (delta) and the
// beta-shock volatility evolution (beta).  Both in (0, 1]; 1 = static.
struct Discounts {
  double delta = 0.98;
  double beta = 0.98;

  Discounts() = default;
  Discounts(double d, double b);
};

// Normal-gamma posterior for (theta, lambda) at one time:
//   theta | lambda ~ N(m, C / (s * lambda)),   lambda ~ Ga(n/2, n*s/2).
// C is kept on the data scale, so the one-step forecast scale below is
// s + F'RF as in the standard discount-DLM recursions.
struct Posterior {
  VectorXd m;  // coefficient mean
  MatrixXd C;  // coefficient scale, symmetric PSD
  double n = 1.0;  // volatility degrees of freedom
  double s = 1.0;  // volatility point estimate

  Posterior() = default;
  Posterior(VectorXd m_, MatrixXd C_, double n_, double s_);
  int dim() const { return static_cast<int>(m.size()); }
};

// One-step-evolved prior: a = m, R = C/delta, r = beta*n, s carried over.
struct Prior {
  VectorXd a;
  MatrixXd R;
  double r = 1.0;
  double s = 1.0;

  int dim() const { return static_cast<int>(a.size()); }
};

// Student-T forecast law with a variance-like scale parameter.
struct StudentT {
  double dof = 1.0;
  double location = 0.0;
  double scale = 1.0;
};

Prior evolve(const Posterior& post, const Discounts& disc);

// k applications of evolve with no intervening updates:
// R = C/delta^k, r = beta^k * n.
Prior evolve_k(const Posterior& post, const Discounts& disc, int k);

StudentT one_step_forecast(const Prior& prior, const VectorXd& F);

double log_predictive(const StudentT& f, double y);

// Conjugate update with q = s + F'RF, e = y - F'a, A = RF/q:
//   m = a + A e,   n = r + 1,   s_new = s (r + e^2/q) / n,
//   C = (s_new/s) (R - A A' q), re-symmetrized.
Posterior update(const Prior& prior, const VectorXd& F, double y);

}  // namespace ddnm::dlm
