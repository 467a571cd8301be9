#include "ddnm/dlm.hpp"

#include <cmath>
#include <stdexcept>

namespace ddnm::dlm {

namespace {
constexpr double kMinScale = 1e-12;  // floor for q before division

void check_dims(int have, int want, const char* what) {
  if (have != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}
}  // namespace

Discounts::Discounts(double d, double b) : delta(d), beta(b) {
  if (!(d > 0.0 && d <= 1.0) || !(b > 0.0 && b <= 1.0)) {
    throw std::invalid_argument("discount factors must lie in (0, 1]");
  }
}

Posterior::Posterior(VectorXd m_, MatrixXd C_, double n_, double s_)
    : m(std::move(m_)), C(std::move(C_)), n(n_), s(s_) {
  if (C.rows() != C.cols() || C.rows() != m.size()) {
    throw std::invalid_argument("posterior: m and C dimensions disagree");
  }
  if (!(n > 0.0) || !(s > 0.0)) {
    throw std::invalid_argument("posterior: n and s must be positive");
  }
}

Prior evolve(const Posterior& post, const Discounts& disc) {
  Prior pr;
  pr.a = post.m;
  pr.R = post.C / disc.delta;
  pr.r = disc.beta * post.n;
  pr.s = post.s;
  return pr;
}

Prior evolve_k(const Posterior& post, const Discounts& disc, int k) {
  if (k < 1) throw std::invalid_argument("evolve_k: k must be >= 1");
  // iterated so the compounding is bit-identical to k separate evolve calls
  Prior pr = evolve(post, disc);
  for (int i = 1; i < k; ++i) {
    pr.R /= disc.delta;
    pr.r *= disc.beta;
  }
  return pr;
}

StudentT one_step_forecast(const Prior& prior, const VectorXd& F) {
  check_dims(static_cast<int>(F.size()), prior.dim(), "one_step_forecast");
  StudentT f;
  f.dof = prior.r;
  f.location = F.dot(prior.a);
  f.scale = prior.s + F.dot(prior.R * F);
  if (f.scale < kMinScale) f.scale = kMinScale;
  return f;
}

double log_predictive(const StudentT& f, double y) {
  const double nu = f.dof;
  const double z2 = (y - f.location) * (y - f.location) / f.scale;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * M_PI * f.scale) -
         0.5 * (nu + 1.0) * std::log1p(z2 / nu);
}

Posterior update(const Prior& prior, const VectorXd& F, double y) {
  check_dims(static_cast<int>(F.size()), prior.dim(), "update");
  if (!std::isfinite(y)) throw std::invalid_argument("update: non-finite observation");

  const VectorXd RF = prior.R * F;
  double q = prior.s + F.dot(RF);
  if (q < kMinScale) q = kMinScale;
  const double e = y - F.dot(prior.a);
  const VectorXd A = RF / q;

  Posterior post;
  post.m = prior.a + A * e;
  post.n = prior.r + 1.0;
  post.s = prior.s * (prior.r + e * e / q) / post.n;
  post.C = (post.s / prior.s) * (prior.R - A * A.transpose() * q);
  post.C = 0.5 * (post.C + post.C.transpose()).eval();  // symmetrize against drift
  return post;
}

}  // namespace ddnm::dlm
