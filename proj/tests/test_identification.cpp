#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jpsn/identification.hpp"

using namespace jpsn;
using namespace jpsn::test;

namespace {

JpsnParams random_params(int n, int q, Rng& rng) {
  JpsnParams p;
  p.n = n;
  p.q = q;
  const int dim = 2 * n + q;
  p.mu.resize(dim);
  for (int i = 0; i < dim; ++i) p.mu[i] = rng.normal();
  MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.normal() * 0.5;
  p.sigma = a * a.transpose() + MatrixXd::Identity(dim, dim);
  p.lambda.resize(q);
  for (int j = 0; j < q; ++j) p.lambda[j] = rng.normal();
  return p;
}

}  // namespace

TEST_CASE("identify pins every circular block's second variance to one") {
  Rng rng(211);
  for (int rep = 0; rep < 20; ++rep) {
    JpsnParams p = random_params(2, 2, rng);
    IdentifiedJpsnParams ip = identify(p);
    for (int i = 0; i < p.n; ++i)
      CHECK(ip.sigma_tilde(2 * i + 1, 2 * i + 1) ==
            doctest::Approx(1.0).epsilon(1e-12));
    CHECK((ip.lambda - p.lambda).norm() == 0.0);
    cholesky_pd(ip.sigma_tilde, "test");
  }
}

TEST_CASE("identify leaves already-identified input unchanged") {
  JpsnParams p;
  p.n = 1;
  p.q = 1;
  p.mu = VectorXd(3);
  p.mu << 0.5, -0.2, 1.0;
  p.sigma.resize(3, 3);
  p.sigma << 2.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.5;
  p.lambda = VectorXd(1);
  p.lambda << 0.7;
  IdentifiedJpsnParams ip = identify(p);
  CHECK(ip.scaling.c[0] == doctest::Approx(1.0));
  CHECK((ip.mu_tilde - p.mu).norm() < 1e-14);
  CHECK((ip.sigma_tilde - p.sigma).norm() < 1e-14);
}

TEST_CASE("identify on an isotropic circular block") {
  JpsnParams p;
  p.n = 1;
  p.q = 0;
  p.mu = VectorXd(2);
  p.mu << 2.0, 2.0;
  p.sigma = 4.0 * MatrixXd::Identity(2, 2);
  p.lambda = VectorXd(0);
  IdentifiedJpsnParams ip = identify(p);
  CHECK(ip.scaling.c[0] == doctest::Approx(0.5));
  CHECK(ip.mu_tilde[0] == doctest::Approx(1.0));
  CHECK(ip.mu_tilde[1] == doctest::Approx(1.0));
  CHECK((ip.sigma_tilde - MatrixXd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("identify is idempotent") {
  Rng rng(223);
  JpsnParams p = random_params(3, 1, rng);
  IdentifiedJpsnParams once = identify(p);
  JpsnParams as_params;
  as_params.n = once.n;
  as_params.q = once.q;
  as_params.mu = once.mu_tilde;
  as_params.sigma = once.sigma_tilde;
  as_params.lambda = once.lambda;
  IdentifiedJpsnParams twice = identify(as_params);
  CHECK((twice.mu_tilde - once.mu_tilde).norm() < 1e-12);
  CHECK((twice.sigma_tilde - once.sigma_tilde).norm() < 1e-12);
  for (int i = 0; i < once.n; ++i)
    CHECK(twice.scaling.c[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unidentify round trips") {
  Rng rng(227);
  JpsnParams p = random_params(2, 2, rng);
  IdentifiedJpsnParams ip = identify(p);

  // scaling of ones returns the identified parameters unchanged
  ScalingRecord ones;
  ones.c = VectorXd::Ones(2);
  JpsnParams same = unidentify(ip, ones);
  CHECK((same.mu - ip.mu_tilde).norm() == 0.0);
  CHECK((same.sigma - ip.sigma_tilde).norm() == 0.0);

  // the original scaling reproduces the original parameters
  JpsnParams back = unidentify(ip, ip.scaling);
  CHECK((back.mu - p.mu).norm() < 1e-10);
  CHECK((back.sigma - p.sigma).norm() < 1e-10);

  // identify . unidentify is the identity for any positive scaling
  ScalingRecord arbitrary;
  arbitrary.c = VectorXd(2);
  arbitrary.c << 0.3, 2.7;
  IdentifiedJpsnParams again = identify(unidentify(ip, arbitrary));
  CHECK((again.mu_tilde - ip.mu_tilde).norm() < 1e-12);
  CHECK((again.sigma_tilde - ip.sigma_tilde).norm() < 1e-12);

  ScalingRecord bad;
  bad.c = VectorXd(2);
  bad.c << 1.0, -1.0;
  CHECK_THROWS_AS(unidentify(ip, bad), std::invalid_argument);
}

TEST_CASE("correlation matrix properties") {
  Rng rng(229);
  JpsnParams p = random_params(2, 1, rng);
  IdentifiedJpsnParams ip = identify(p);
  MatrixXd omega = correlation_matrix(ip);
  const int dim = ip.dim();
  for (int i = 0; i < dim; ++i) CHECK(omega(i, i) == doctest::Approx(1.0));
  CHECK((omega - omega.transpose()).norm() < 1e-12);

  // scale-free: the correlation of the unidentified sigma is the same
  MatrixXd direct = p.sigma;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      direct(i, j) /= std::sqrt(p.sigma(i, i) * p.sigma(j, j));
  CHECK((omega - direct).norm() < 1e-12);

  // diagonal input gives the identity
  JpsnParams diag;
  diag.n = 1;
  diag.q = 1;
  diag.mu = VectorXd::Zero(3);
  diag.sigma = VectorXd::LinSpaced(3, 1.0, 3.0).asDiagonal();
  diag.lambda = VectorXd::Zero(1);
  CHECK((correlation_matrix(identify(diag)) - MatrixXd::Identity(3, 3)).norm() <
        1e-13);

  // hand value: covariance 0.5 with variances (4, 1)
  JpsnParams hand;
  hand.n = 1;
  hand.q = 0;
  hand.mu = VectorXd::Zero(2);
  hand.sigma.resize(2, 2);
  hand.sigma << 4.0, 0.5, 0.5, 1.0;
  hand.lambda = VectorXd(0);
  CHECK(correlation_matrix(identify(hand))(0, 1) == doctest::Approx(0.25));
}

TEST_CASE("scaling leaves the angle distribution unchanged (KS)") {
  Rng rng(233);
  int failures = 0;
  for (int rep = 0; rep < 10; ++rep) {
    JpsnParams p = random_params(1, 1, rng);
    ScalingRecord c;
    c.c = VectorXd(1);
    c.c << rng.uniform(0.2, 5.0);
    JpsnParams scaled;
    scaled.n = p.n;
    scaled.q = p.q;
    VectorXd d = c.expand(p.n, p.q);
    scaled.mu = d.cwiseProduct(p.mu);
    scaled.sigma = d.asDiagonal() * p.sigma * d.asDiagonal();
    scaled.lambda = p.lambda;
    const int N = 4000;
    std::vector<double> a(N), b(N);
    for (int i = 0; i < N; ++i) {
      a[i] = jpsn_sample(p, rng).theta[0].value();
      b[i] = jpsn_sample(scaled, rng).theta[0].value();
    }
    if (ks_two_sample(a, b) <= 0.01) ++failures;
  }
  CHECK(failures <= 1);
}
