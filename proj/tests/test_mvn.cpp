#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "jpsn/mvn.hpp"

using namespace jpsn;
using namespace jpsn::test;

namespace {

MatrixXd random_spd(int p, Rng& rng) {
  MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + 0.5 * MatrixXd::Identity(p, p);
}

}  // namespace

TEST_CASE("mvn logpdf standard normal at mode") {
  VectorXd x = VectorXd::Zero(1), mu = VectorXd::Zero(1);
  MatrixXd cov = MatrixXd::Identity(1, 1);
  CHECK(mvn_logpdf(x, mu, cov) ==
        doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
}

TEST_CASE("mvn logpdf invariant under coordinate permutation") {
  Rng rng(11);
  const int p = 4;
  MatrixXd cov = random_spd(p, rng);
  VectorXd mu(p), x(p);
  for (int i = 0; i < p; ++i) {
    mu[i] = rng.normal();
    x[i] = rng.normal();
  }
  const double base = mvn_logpdf(x, mu, cov);
  std::vector<int> perm = {2, 0, 3, 1};
  VectorXd mu2(p), x2(p);
  MatrixXd cov2(p, p);
  for (int i = 0; i < p; ++i) {
    mu2[i] = mu[perm[i]];
    x2[i] = x[perm[i]];
    for (int j = 0; j < p; ++j) cov2(i, j) = cov(perm[i], perm[j]);
  }
  CHECK(mvn_logpdf(x2, mu2, cov2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("mvn logpdf matches explicit 2d formula") {
  Eigen::Matrix2d cov;
  cov << 2.0, 0.6, 0.6, 1.0;
  VectorXd mu(2), x(2);
  mu << 1.0, -1.0;
  x << 0.3, 0.4;
  VectorXd d = x - mu;
  const double det = cov.determinant();
  const double quad = d.dot(cov.inverse() * d);
  const double expect =
      -std::log(2 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
  CHECK(mvn_logpdf(x, mu, cov) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("mvn sampler mean and covariance converge") {
  Rng rng(17);
  const int p = 3;
  MatrixXd cov = random_spd(p, rng);
  VectorXd mu(p);
  mu << 1.0, -2.0, 0.5;
  const int N = 1000000;
  VectorXd mean = VectorXd::Zero(p);
  MatrixXd second = MatrixXd::Zero(p, p);
  for (int i = 0; i < N; ++i) {
    VectorXd v = mvn_sample(mu, cov, rng);
    mean += v;
    second += v * v.transpose();
  }
  mean /= N;
  second /= N;
  MatrixXd cov_hat = second - mean * mean.transpose();
  for (int i = 0; i < p; ++i) {
    const double se = 4.0 * std::sqrt(cov(i, i) / N);
    CHECK(std::fabs(mean[i] - mu[i]) < se);
    for (int j = 0; j < p; ++j)
      CHECK(cov_hat(i, j) == doctest::Approx(cov(i, j)).epsilon(0.02));
  }
}

TEST_CASE("mvn rejects non-positive-definite covariance") {
  MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  VectorXd z = VectorXd::Zero(2);
  CHECK_THROWS_AS(mvn_logpdf(z, z, bad), std::runtime_error);
}

TEST_CASE("gaussian conditioning against direct formula") {
  Rng rng(19);
  const int p = 5;
  MatrixXd cov = random_spd(p, rng);
  VectorXd mu(p);
  for (int i = 0; i < p; ++i) mu[i] = rng.normal();
  std::vector<int> target = {0, 3};
  std::vector<int> given = {1, 2, 4};
  VectorXd gv(3);
  gv << 0.5, -0.2, 1.1;
  GaussianConditional cond = condition_mvn(mu, cov, target, given, gv);

  MatrixXd s_tt(2, 2), s_tg(2, 3), s_gg(3, 3);
  VectorXd m_t(2), m_g(3);
  for (int i = 0; i < 2; ++i) {
    m_t[i] = mu[target[i]];
    for (int j = 0; j < 2; ++j) s_tt(i, j) = cov(target[i], target[j]);
    for (int j = 0; j < 3; ++j) s_tg(i, j) = cov(target[i], given[j]);
  }
  for (int i = 0; i < 3; ++i) {
    m_g[i] = mu[given[i]];
    for (int j = 0; j < 3; ++j) s_gg(i, j) = cov(given[i], given[j]);
  }
  VectorXd mean_expect = m_t + s_tg * s_gg.inverse() * (gv - m_g);
  MatrixXd cov_expect = s_tt - s_tg * s_gg.inverse() * s_tg.transpose();
  CHECK((cond.mean - mean_expect).norm() < 1e-10);
  CHECK((cond.cov - cov_expect).norm() < 1e-10);

  GaussianConditional marg = condition_mvn(mu, cov, target, {}, VectorXd(0));
  CHECK(marg.mean[0] == mu[0]);
  CHECK(marg.cov(1, 1) == cov(3, 3));
}

TEST_CASE("conditional mean and variance, bivariate closed form") {
  MatrixXd cov(2, 2);
  cov << 1.0, 0.8, 0.8, 2.0;
  VectorXd mu(2);
  mu << 0.0, 1.0;
  VectorXd gv(1);
  gv << 1.5;
  GaussianConditional cond = condition_mvn(mu, cov, {1}, {0}, gv);
  CHECK(cond.mean[0] == doctest::Approx(1.0 + 0.8 * 1.5).epsilon(1e-12));
  CHECK(cond.cov(0, 0) == doctest::Approx(2.0 - 0.64).epsilon(1e-12));
}
