#include <doctest.h>

#include <cmath>
#include <random>

#include "ddnm/dlm.hpp"
#include "oracles.hpp"

using namespace ddnm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

dlm::Posterior scalar_post(double m, double C, double n, double s) {
  VectorXd mv(1);
  mv << m;
  MatrixXd Cv(1, 1);
  Cv << C;
  return dlm::Posterior(mv, Cv, n, s);
}

// T density via the gamma-function product form, written independently of
// the engine's lgamma expression.
double t_density_reference(double nu, double mu, double q, double y) {
  const double z2 = (y - mu) * (y - mu) / q;
  return std::tgamma((nu + 1.0) / 2.0) /
         (std::tgamma(nu / 2.0) * std::sqrt(nu * M_PI * q)) *
         std::pow(1.0 + z2 / nu, -(nu + 1.0) / 2.0);
}

// integrates exp(log_predictive) over the real line via the tan substitution
double integrate_density(const dlm::StudentT& f) {
  const double half = M_PI / 2.0 - 1e-9;
  return oracle::simpson(
      [&](double u) {
        const double y = f.location + std::sqrt(f.scale) * std::tan(u);
        const double jac = std::sqrt(f.scale) / std::pow(std::cos(u), 2);
        return std::exp(dlm::log_predictive(f, y)) * jac;
      },
      -half, half, 8192);
}

}  // namespace

TEST_CASE("evolve arithmetic") {
  auto post = scalar_post(0.5, 2.0, 10.0, 1.5);
  auto pr = dlm::evolve(post, dlm::Discounts(0.8, 0.9));
  CHECK(pr.a[0] == doctest::Approx(0.5));
  CHECK(pr.R(0, 0) == doctest::Approx(2.5));
  CHECK(pr.r == doctest::Approx(9.0));
  CHECK(pr.s == doctest::Approx(1.5));
}

TEST_CASE("evolve with unit discounts is the identity") {
  auto post = scalar_post(-1.2, 0.7, 4.0, 2.2);
  auto pr = dlm::evolve(post, dlm::Discounts(1.0, 1.0));
  CHECK(pr.a[0] == post.m[0]);
  CHECK(pr.R(0, 0) == post.C(0, 0));
  CHECK(pr.r == post.n);
  CHECK(pr.s == post.s);
}

TEST_CASE("evolve scales a matrix state and keeps symmetry") {
  VectorXd m(2);
  m << 0.0, 1.0;
  MatrixXd C(2, 2);
  C << 1.0, 0.2, 0.2, 1.0;
  auto pr = dlm::evolve(dlm::Posterior(m, C, 5.0, 1.0), dlm::Discounts(0.5, 1.0));
  CHECK(pr.R(0, 0) == doctest::Approx(2.0));
  CHECK(pr.R(0, 1) == doctest::Approx(0.4));
  CHECK(pr.R(1, 0) == pr.R(0, 1));
}

TEST_CASE("one-step forecast") {
  dlm::Prior pr;
  pr.a = VectorXd::Zero(2);
  pr.R = MatrixXd::Identity(2, 2);
  pr.r = 5.0;
  pr.s = 1.0;
  VectorXd F(2);
  F << 1.0, 1.0;
  auto f = dlm::one_step_forecast(pr, F);
  CHECK(f.dof == doctest::Approx(5.0));
  CHECK(f.location == doctest::Approx(0.0));
  CHECK(f.scale == doctest::Approx(3.0));

  SUBCASE("zero regressor collapses to the volatility scale") {
    auto f0 = dlm::one_step_forecast(pr, VectorXd::Zero(2));
    CHECK(f0.location == doctest::Approx(0.0));
    CHECK(f0.scale == doctest::Approx(1.0));
  }
  SUBCASE("zero state scale means no state uncertainty") {
    pr.R = MatrixXd::Zero(2, 2);
    auto f0 = dlm::one_step_forecast(pr, F);
    CHECK(f0.scale == doctest::Approx(1.0));
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS(dlm::one_step_forecast(pr, VectorXd::Zero(3)));
  }
}

TEST_CASE("log predictive density") {
  SUBCASE("Cauchy at the mode") {
    dlm::StudentT f{1.0, 0.0, 1.0};
    CHECK(dlm::log_predictive(f, 0.0) == doctest::Approx(std::log(1.0 / M_PI)).epsilon(1e-12));
  }
  SUBCASE("symmetry about the location") {
    dlm::StudentT f{7.0, 1.5, 2.5};
    for (double z : {0.3, 1.0, 4.2})
      CHECK(dlm::log_predictive(f, 1.5 + z) == dlm::log_predictive(f, 1.5 - z));
  }
  SUBCASE("matches the reference closed form and integrates to one") {
    dlm::StudentT f{10.0, 2.0, 4.0};
    CHECK(dlm::log_predictive(f, 3.0) ==
          doctest::Approx(std::log(t_density_reference(10.0, 2.0, 4.0, 3.0))).epsilon(1e-12));
    CHECK(integrate_density(f) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("density integrates to one across dof regimes") {
    for (double dof : {1.0, 5.0, 50.0}) {
      dlm::StudentT f{dof, -0.7, 2.3};
      CHECK(integrate_density(f) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("update hand arithmetic, scalar case") {
  dlm::Prior pr;
  pr.a = VectorXd::Zero(1);
  pr.R = MatrixXd::Identity(1, 1);
  pr.r = 1.0;
  pr.s = 1.0;
  VectorXd F(1);
  F << 1.0;
  auto post = dlm::update(pr, F, 1.0);
  CHECK(post.m[0] == doctest::Approx(0.5));
  CHECK(post.n == doctest::Approx(2.0));
  CHECK(post.s == doctest::Approx(0.75));
}

TEST_CASE("update at the forecast location contracts the posterior") {
  VectorXd a(2);
  a << 0.4, -0.2;
  MatrixXd R(2, 2);
  R << 1.0, 0.3, 0.3, 2.0;
  dlm::Prior pr{a, R, 6.0, 1.7};
  VectorXd F(2);
  F << 1.0, 0.5;
  const double y = F.dot(a);  // e = 0
  auto post = dlm::update(pr, F, y);
  CHECK(post.m.isApprox(a, 1e-14));
  CHECK(post.s == doctest::Approx(1.7 * 6.0 / 7.0).epsilon(1e-15));
  CHECK(post.C.trace() <= R.trace());
  CHECK(post.C.isApprox(post.C.transpose()));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(post.C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("sequential filtering with unit discounts equals the batch conjugate posterior") {
  std::mt19937_64 gen(91);
  std::normal_distribution<double> z;
  for (int p : {1, 3, 5}) {
    const int N = 100;
    MatrixXd X(N, p);
    VectorXd y(N);
    VectorXd truth(p);
    for (int i = 0; i < p; ++i) truth[i] = z(gen);
    for (int t = 0; t < N; ++t) {
      for (int i = 0; i < p; ++i) X(t, i) = i == 0 ? 1.0 : z(gen);
      y[t] = X.row(t).dot(truth) + 0.4 * z(gen);
    }
    oracle::NormalGamma prior;
    prior.m = VectorXd::Zero(p);
    prior.C = MatrixXd::Identity(p, p) * 2.0;
    prior.n = 3.0;
    prior.s = 1.2;

    dlm::Posterior state(prior.m, prior.C, prior.n, prior.s);
    const dlm::Discounts disc(1.0, 1.0);
    for (int t = 0; t < N; ++t)
      state = dlm::update(dlm::evolve(state, disc), X.row(t).transpose(), y[t]);

    auto batch = oracle::batch_conjugate_posterior(X, y, prior);
    CHECK(state.m.isApprox(batch.m, 1e-10));
    CHECK(state.C.isApprox(batch.C, 1e-10));
    CHECK(state.n == doctest::Approx(batch.n).epsilon(1e-12));
    CHECK(state.s == doctest::Approx(batch.s).epsilon(1e-10));
  }
}

TEST_CASE("batch oracle degenerate windows") {
  oracle::NormalGamma prior;
  prior.m = VectorXd::Zero(1);
  prior.C = MatrixXd::Identity(1, 1);
  prior.n = 2.0;
  prior.s = 1.0;

  SUBCASE("zero observations returns the prior") {
    auto post = oracle::batch_conjugate_posterior(MatrixXd(0, 1), VectorXd(0), prior);
    CHECK(post.m[0] == prior.m[0]);
    CHECK(post.n == prior.n);
  }
  SUBCASE("one observation equals a single update") {
    MatrixXd X(1, 1);
    X << 1.0;
    VectorXd y(1);
    y << 0.8;
    auto batch = oracle::batch_conjugate_posterior(X, y, prior);
    dlm::Posterior state(prior.m, prior.C, prior.n, prior.s);
    state = dlm::update(dlm::evolve(state, dlm::Discounts(1.0, 1.0)), X.row(0).transpose(), y[0]);
    CHECK(state.m.isApprox(batch.m, 1e-12));
    CHECK(state.s == doctest::Approx(batch.s).epsilon(1e-12));
  }
}

TEST_CASE("evolve_k") {
  auto post = scalar_post(0.3, 1.0, 8.0, 1.1);
  const dlm::Discounts disc(0.98, 0.97);

  SUBCASE("k = 1 is evolve") {
    auto a = dlm::evolve_k(post, disc, 1);
    auto b = dlm::evolve(post, disc);
    CHECK(a.R(0, 0) == b.R(0, 0));
    CHECK(a.r == b.r);
  }
  SUBCASE("unit discounts leave the posterior untouched for any k") {
    auto pr = dlm::evolve_k(post, dlm::Discounts(1.0, 1.0), 37);
    CHECK(pr.R(0, 0) == post.C(0, 0));
    CHECK(pr.r == post.n);
  }
  SUBCASE("24-step compounding") {
    auto pr = dlm::evolve_k(scalar_post(0.0, 1.0, 1.0, 1.0), dlm::Discounts(0.98, 1.0), 24);
    CHECK(pr.R(0, 0) == doctest::Approx(1.0 / std::pow(0.98, 24)).epsilon(1e-12));
    CHECK(pr.R(0, 0) == doctest::Approx(1.62396).epsilon(1e-5));
  }
  SUBCASE("matches k repeated evolve calls bit for bit") {
    dlm::Prior chain = dlm::evolve(post, disc);
    for (int i = 1; i < 6; ++i) {
      dlm::Posterior carrier(chain.a, chain.R, chain.r, chain.s);
      chain = dlm::evolve(carrier, disc);
    }
    auto direct = dlm::evolve_k(post, disc, 6);
    CHECK(direct.R(0, 0) == chain.R(0, 0));
    CHECK(direct.r == chain.r);
  }
}

TEST_CASE("construction guards") {
  CHECK_THROWS(dlm::Discounts(0.0, 0.5));
  CHECK_THROWS(dlm::Discounts(0.5, 1.5));
  CHECK_THROWS(scalar_post(0.0, 1.0, -1.0, 1.0));
  CHECK_THROWS(scalar_post(0.0, 1.0, 1.0, 0.0));
  dlm::Prior pr;
  pr.a = VectorXd::Zero(1);
  pr.R = MatrixXd::Identity(1, 1);
  pr.r = 1.0;
  pr.s = 1.0;
  VectorXd F(1);
  F << 1.0;
  CHECK_THROWS(dlm::update(pr, F, std::nan("")));
}
