#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace ddnm::oracle {

NormalGamma batch_conjugate_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const NormalGamma& prior) {
  const int p = static_cast<int>(prior.m.size());
  const int N = static_cast<int>(y.size());
  if (X.cols() != p || X.rows() != N)
    throw std::invalid_argument("batch oracle: X does not conform");

  if (N == 0) return prior;

  // precision-normalized prior scale: theta | sigma^2 ~ N(m0, sigma^2 C/s)
  const Eigen::MatrixXd C_hat0 = prior.C / prior.s;
  const Eigen::MatrixXd Lambda0 = C_hat0.inverse();
  const Eigen::MatrixXd LambdaN = Lambda0 + X.transpose() * X;
  const Eigen::VectorXd mN = LambdaN.inverse() * (Lambda0 * prior.m + X.transpose() * y);

  const double a0 = prior.n / 2.0;
  const double b0 = prior.n * prior.s / 2.0;
  const double aN = a0 + N / 2.0;
  const double bN = b0 + 0.5 * (y.dot(y) + prior.m.dot(Lambda0 * prior.m) - mN.dot(LambdaN * mN));

  NormalGamma post;
  post.m = mN;
  post.n = 2.0 * aN;
  post.s = 2.0 * bN / post.n;
  post.C = LambdaN.inverse() * post.s;
  return post;
}

std::vector<ModelIndicator> enumerate_models(const CandidatePool& pool) {
  std::vector<int> free_idx;
  for (int i = 0; i < pool.size(); ++i)
    if (!pool.forced[i]) free_idx.push_back(i);
  if (free_idx.size() > 12)
    throw std::invalid_argument("enumerate_models: pool too large (p_free > 12)");

  std::vector<ModelIndicator> out;
  const std::size_t total = std::size_t{1} << free_idx.size();
  out.reserve(total);
  for (std::size_t mask = 0; mask < total; ++mask) {
    ModelIndicator m = ModelIndicator::forced_only(pool);
    for (std::size_t b = 0; b < free_idx.size(); ++b)
      if (mask & (std::size_t{1} << b)) m.bits[static_cast<std::size_t>(free_idx[b])] = 1;
    out.push_back(std::move(m));
  }
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double ar1_rw_expected_msfe(double phi, double sigma, int h) {
  const double gamma0 = sigma * sigma / (1.0 - phi * phi);
  return 2.0 * gamma0 * (1.0 - std::pow(phi, h));
}

double refit_onestep_score(const CandidatePool& pool, const ModelIndicator& model,
                           const SeriesPanel& panel, const PriorSpec& prior,
                           const dlm::Discounts& disc, int fit_start, int t_end, double alpha) {
  dlm::Posterior state = prior.initial_state(model);
  double score = 0.0;
  for (int t = fit_start; t <= t_end; ++t) {
    const Eigen::VectorXd F = design_vector(pool, model, panel, t);
    const double y = panel.y(pool.series, t);
    const dlm::Prior pr = dlm::evolve(state, disc);
    score = alpha * score + dlm::log_predictive(dlm::one_step_forecast(pr, F), y);
    state = dlm::update(pr, F, y);
  }
  return score;
}

OracleReport check_close(const std::string& case_id, double oracle_value, double engine_value,
                         double tolerance) {
  OracleReport r;
  r.case_id = case_id;
  r.oracle_value = oracle_value;
  r.engine_value = engine_value;
  r.tolerance = tolerance;
  r.pass = std::abs(oracle_value - engine_value) <= tolerance;
  return r;
}

}  // namespace ddnm::oracle
