#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "jpsn/distributions.hpp"
#include "jpsn/special.hpp"

using namespace jpsn;
using namespace jpsn::test;

namespace {
constexpr double pi = std::numbers::pi;

// Test-side closed form of the projected normal density, independent of the
// quadrature implementation.
double pn_density_closed_form(double theta, const Eigen::Vector2d& mu,
                              const Eigen::Matrix2d& sigma) {
  const Eigen::Matrix2d prec = sigma.inverse();
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  const double a = u.dot(prec * u);
  const double b = u.dot(prec * mu);
  const double c = mu.dot(prec * mu);
  const double integral =
      1.0 / a + (b / std::pow(a, 1.5)) * std::sqrt(2 * pi) *
                    std::exp(b * b / (2 * a)) * norm_cdf(b / std::sqrt(a));
  return std::exp(-0.5 * c) * integral /
         (2 * pi * std::sqrt(sigma.determinant()));
}

}  // namespace

TEST_CASE("skew normal logpdf: zero skewness reduces to the normal") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const int q = 1 + static_cast<int>(rng.uniform_index(3));
    MatrixXd a(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) a(i, j) = rng.normal();
    MatrixXd sigma = a * a.transpose() + MatrixXd::Identity(q, q);
    VectorXd mu(q), y(q);
    for (int i = 0; i < q; ++i) {
      mu[i] = rng.normal();
      y[i] = rng.normal() * 2;
    }
    const double sn = skew_normal_logpdf(y, mu, sigma, VectorXd::Zero(q));
    const double normal = mvn_logpdf(y, mu, sigma);
    CHECK(sn == doctest::Approx(normal).epsilon(1e-12));
  }
}

TEST_CASE("skew normal logpdf: scalar hand value") {
  VectorXd y(1), mu(1), lam(1);
  MatrixXd sigma(1, 1);
  y << 0.0;
  mu << 0.0;
  sigma << 1.0;
  lam << 1.0;
  // 2 phi(0; 0, 2) Phi(0) = phi(0; 0, 2); log = -log(4 pi)/2
  CHECK(skew_normal_logpdf(y, mu, sigma, lam) ==
        doctest::Approx(-0.5 * std::log(4 * pi)).epsilon(1e-12));
  CHECK(skew_normal_logpdf(y, mu, sigma, lam) ==
        doctest::Approx(-1.2655).epsilon(1e-4));
}

TEST_CASE("skew normal density integrates to one (quadrature oracle)") {
  Rng rng(103);
  for (int rep = 0; rep < 5; ++rep) {
    VectorXd mu(1), lam(1);
    MatrixXd sigma(1, 1);
    mu << rng.uniform(-1.0, 1.0);
    sigma << rng.uniform(0.3, 2.5);
    lam << rng.uniform(-3.0, 3.0);
    const double scale = std::sqrt(sigma(0, 0) + lam[0] * lam[0]);
    const double mass = gauss_legendre(
        [&](double y) {
          VectorXd yv(1);
          yv << y;
          return std::exp(skew_normal_logpdf(yv, mu, sigma, lam));
        },
        mu[0] - 12 * scale, mu[0] + 12 * scale, 40);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("skew normal bivariate density integrates to one") {
  VectorXd mu(2), lam(2);
  MatrixXd sigma(2, 2);
  mu << 0.3, -0.5;
  sigma << 1.0, 0.4, 0.4, 1.5;
  lam << 1.2, -0.7;
  const double mass = gauss_legendre(
      [&](double y1) {
        return gauss_legendre(
            [&](double y2) {
              VectorXd y(2);
              y << y1, y2;
              return std::exp(skew_normal_logpdf(y, mu, sigma, lam));
            },
            -10.0, 10.0, 24);
      },
      -10.0, 10.0, 24);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("skew normal sampler: zero skewness matches plain normal") {
  Rng rng(107);
  VectorXd mu(1);
  MatrixXd sigma(1, 1);
  mu << 0.7;
  sigma << 1.3;
  std::vector<double> a(20000), b(20000);
  for (auto& v : a) v = skew_normal_sample(mu, sigma, VectorXd::Zero(1), rng)[0];
  for (auto& v : b) v = mvn_sample(mu, sigma, rng)[0];
  CHECK(ks_two_sample(a, b) > 0.01);
}

TEST_CASE("skew normal moments: the sampler adjudicates the variance formula") {
  // mean = mu + lambda sqrt(2/pi); variance = sigma + (1 - 2/pi) lambda^2.
  Rng rng(109);
  VectorXd mu(1), lam(1);
  MatrixXd sigma(1, 1);
  mu << 0.0;
  sigma << 1.0;
  lam << 1.0;
  const int N = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double y = skew_normal_sample(mu, sigma, lam, rng)[0];
    s1 += y;
    s2 += y * y;
  }
  const double mean = s1 / N;
  const double var = s2 / N - mean * mean;
  auto [m, v] = skew_normal_moments(mu, sigma, lam);
  CHECK(m[0] == doctest::Approx(std::sqrt(2.0 / pi)).epsilon(1e-12));
  CHECK(mean == doctest::Approx(m[0]).epsilon(0.01));
  CHECK(var == doctest::Approx(v(0, 0)).epsilon(0.01));
  // and the disfavored (1 + 2/pi) coefficient is clearly rejected
  CHECK(std::fabs(var - (1.0 + (1.0 + 2.0 / pi))) > 0.5);
}

TEST_CASE("skew normal moments componentwise") {
  VectorXd mu = VectorXd::Zero(2), lam(2);
  lam << 1.0, 2.0;
  MatrixXd sigma = MatrixXd::Identity(2, 2);
  auto [m, v] = skew_normal_moments(mu, sigma, lam);
  CHECK(m[0] == doctest::Approx(0.79788).epsilon(1e-4));
  CHECK(m[1] == doctest::Approx(1.59577).epsilon(1e-4));
  CHECK(v(0, 1) == doctest::Approx(0.0));
  auto [m0, v0] = skew_normal_moments(mu, sigma, VectorXd::Zero(2));
  CHECK(m0 == mu);
  CHECK(v0 == sigma);
}

TEST_CASE("skew normal moments match sample covariance, correlated case") {
  Rng rng(113);
  VectorXd mu(2), lam(2);
  MatrixXd sigma(2, 2);
  mu << 0.5, -1.0;
  sigma << 1.0, 0.6, 0.6, 2.0;
  lam << 1.5, -0.8;
  auto [m, v] = skew_normal_moments(mu, sigma, lam);
  const int N = 400000;
  VectorXd s1 = VectorXd::Zero(2);
  MatrixXd s2 = MatrixXd::Zero(2, 2);
  for (int i = 0; i < N; ++i) {
    VectorXd y = skew_normal_sample(mu, sigma, lam, rng);
    s1 += y;
    s2 += y * y.transpose();
  }
  s1 /= N;
  s2 /= N;
  MatrixXd cov_hat = s2 - s1 * s1.transpose();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(cov_hat(i, j) == doctest::Approx(v(i, j)).epsilon(0.015));
}

TEST_CASE("projected normal: rotational symmetry gives the uniform") {
  Eigen::Vector2d mu(0.0, 0.0);
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  for (double t : {0.0, 1.0, 3.0, 6.0})
    CHECK(projected_normal_logpdf(Angle(t), mu, sigma) ==
          doctest::Approx(-std::log(2 * pi)).epsilon(1e-10));
}

TEST_CASE("projected normal integrates to one") {
  Eigen::Vector2d mu(1.2, -0.7);
  Eigen::Matrix2d sigma;
  sigma << 1.5, 0.4, 0.4, 0.6;
  const double mass = gauss_legendre(
      [&](double t) {
        return std::exp(projected_normal_logpdf(Angle(t), mu, sigma));
      },
      0.0, 2 * pi, 40);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projected normal reflection symmetry about the mean direction") {
  Eigen::Vector2d mu(2.0, 0.0);
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  for (double t : {0.3, 1.0, 2.2, 3.0}) {
    const double f1 = projected_normal_logpdf(Angle(t), mu, sigma);
    const double f2 = projected_normal_logpdf(Angle(2 * pi - t), mu, sigma);
    CHECK(f1 == doctest::Approx(f2).epsilon(1e-8));
  }
}

TEST_CASE("projected normal matches the closed form") {
  Rng rng(127);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Vector2d mu(rng.normal() * 1.5, rng.normal() * 1.5);
    Eigen::Matrix2d a;
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    Eigen::Matrix2d sigma = a * a.transpose() + 0.3 * Eigen::Matrix2d::Identity();
    const double t = rng.uniform(0.0, 2 * pi);
    CHECK(projected_normal_logpdf(Angle(t), mu, sigma) ==
          doctest::Approx(std::log(pn_density_closed_form(t, mu, sigma)))
              .epsilon(1e-8));
  }
}

TEST_CASE("jpsn sampler: uniform angle when centered isotropic") {
  Rng rng(131);
  JpsnParams p;
  p.n = 1;
  p.q = 0;
  p.mu = VectorXd::Zero(2);
  p.sigma = MatrixXd::Identity(2, 2);
  p.lambda = VectorXd(0);
  std::vector<double> angles(20000);
  for (auto& v : angles) v = jpsn_sample(p, rng).theta[0].value();
  CHECK(ks_test(angles, [](double t) { return t / (2 * pi); }) > 0.01);
}

TEST_CASE("jpsn sampler: independence under block-diagonal sigma") {
  Rng rng(137);
  JpsnParams p;
  p.n = 1;
  p.q = 1;
  p.mu = VectorXd::Zero(3);
  p.sigma = MatrixXd::Identity(3, 3);
  p.lambda = VectorXd::Zero(1);
  const int N = 100000;
  double sc = 0.0, ss = 0.0, sy = 0.0, scy = 0.0, ssy = 0.0, sc2 = 0.0,
         ss2 = 0.0, sy2 = 0.0;
  for (int i = 0; i < N; ++i) {
    JpsnDraw d = jpsn_sample(p, rng);
    const double c = std::cos(d.theta[0].value());
    const double s = std::sin(d.theta[0].value());
    const double y = d.y[0];
    sc += c;
    ss += s;
    sy += y;
    scy += c * y;
    ssy += s * y;
    sc2 += c * c;
    ss2 += s * s;
    sy2 += y * y;
  }
  const double rc =
      (scy / N - sc / N * sy / N) /
      std::sqrt((sc2 / N - sc / N * sc / N) * (sy2 / N - sy / N * sy / N));
  const double rs =
      (ssy / N - ss / N * sy / N) /
      std::sqrt((ss2 / N - ss / N * ss / N) * (sy2 / N - sy / N * sy / N));
  CHECK(std::fabs(rc) < 0.02);
  CHECK(std::fabs(rs) < 0.02);
}

TEST_CASE("jpsn sampler: linear block marginal is the skew normal") {
  Rng rng(139);
  JpsnParams p;
  p.n = 1;
  p.q = 2;
  p.mu = VectorXd::Zero(4);
  p.mu.tail(2) << 0.5, -0.5;
  MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.normal() * 0.4;
  p.sigma = a * a.transpose() + MatrixXd::Identity(4, 4);
  p.lambda = VectorXd(2);
  p.lambda << 1.0, -1.5;
  const int N = 30000;
  std::vector<double> y0(N), y1(N), ref0(N), ref1(N);
  for (int i = 0; i < N; ++i) {
    JpsnDraw d = jpsn_sample(p, rng);
    y0[i] = d.y[0];
    y1[i] = d.y[1];
    VectorXd ref = skew_normal_sample(
        p.mu.tail(2), p.sigma.bottomRightCorner(2, 2), p.lambda, rng);
    ref0[i] = ref[0];
    ref1[i] = ref[1];
  }
  CHECK(ks_two_sample(y0, ref0) > 0.01);
  CHECK(ks_two_sample(y1, ref1) > 0.01);
}

TEST_CASE("jpsn marginal closure on a coordinate subset") {
  // (theta_2, y_1) of an (n=2, q=2) jpsn matches direct sampling from the
  // (1, 1) sub-parameterization.
  Rng rng(149);
  JpsnParams p;
  p.n = 2;
  p.q = 2;
  p.mu = VectorXd(6);
  p.mu << 0.4, -0.2, 1.0, 0.5, -0.3, 0.8;
  MatrixXd a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.normal() * 0.3;
  p.sigma = a * a.transpose() + MatrixXd::Identity(6, 6);
  p.lambda = VectorXd(2);
  p.lambda << 1.2, -0.4;

  JpsnParams sub;
  sub.n = 1;
  sub.q = 1;
  sub.mu = VectorXd(3);
  sub.mu << p.mu[2], p.mu[3], p.mu[4];
  sub.sigma.resize(3, 3);
  const int idx[3] = {2, 3, 4};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sub.sigma(i, j) = p.sigma(idx[i], idx[j]);
  sub.lambda = VectorXd(1);
  sub.lambda << p.lambda[0];

  const int N = 20000;
  std::vector<double> th_full(N), th_sub(N), y_full(N), y_sub(N);
  for (int i = 0; i < N; ++i) {
    JpsnDraw full = jpsn_sample(p, rng);
    JpsnDraw small = jpsn_sample(sub, rng);
    th_full[i] = full.theta[1].value();
    th_sub[i] = small.theta[0].value();
    y_full[i] = full.y[0];
    y_sub[i] = small.y[0];
  }
  CHECK(ks_two_sample(th_full, th_sub) > 0.01);
  CHECK(ks_two_sample(y_full, y_sub) > 0.01);
}

TEST_CASE("augmented logdensity: pure-circular case is the polar normal") {
  Rng rng(151);
  JpsnParams p;
  p.n = 1;
  p.q = 0;
  p.mu = VectorXd(2);
  p.mu << 0.8, -0.3;
  p.sigma.resize(2, 2);
  p.sigma << 1.2, 0.3, 0.3, 0.9;
  p.lambda = VectorXd(0);
  for (int rep = 0; rep < 20; ++rep) {
    const double theta = rng.uniform(0.0, 2 * pi);
    const double r = rng.uniform(0.1, 3.0);
    VectorXd w(2);
    w << r * std::cos(theta), r * std::sin(theta);
    const double expect = mvn_logpdf(w, p.mu, p.sigma) + std::log(r);
    VectorXd rv(1), empty(0);
    rv << r;
    CHECK(jpsn_augmented_logdensity({Angle(theta)}, rv, empty, empty, p) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  VectorXd bad(1), empty(0);
  bad << -0.5;
  CHECK_THROWS_AS(jpsn_augmented_logdensity({Angle(0.0)}, bad, empty, empty, p),
                  std::invalid_argument);
}

TEST_CASE("augmented logdensity integrates to the projected normal density") {
  JpsnParams p;
  p.n = 1;
  p.q = 0;
  p.mu = VectorXd(2);
  p.mu << 1.1, 0.4;
  p.sigma.resize(2, 2);
  p.sigma << 0.8, -0.2, -0.2, 1.4;
  p.lambda = VectorXd(0);
  for (double theta : {0.1, 1.3, 2.9, 4.4, 6.0}) {
    const double integral = gauss_legendre(
        [&](double r) {
          VectorXd rv(1), empty(0);
          rv << r;
          return std::exp(
              jpsn_augmented_logdensity({Angle(theta)}, rv, empty, empty, p));
        },
        1e-10, 12.0, 32);
    const double pn = std::exp(
        projected_normal_logpdf(Angle(theta), p.mu, Eigen::Matrix2d(p.sigma)));
    CHECK(integral == doctest::Approx(pn).epsilon(1e-8));
  }
}

TEST_CASE("niw posterior conjugate updates") {
  NiwHyper h;
  h.mu0 = VectorXd(2);
  h.mu0 << 1.0, -1.0;
  h.kappa = 1.0;
  h.dof = 5.0;
  h.psi = MatrixXd::Identity(2, 2);

  NiwHyper same = niw_posterior(h, MatrixXd(0, 2));
  CHECK(same.kappa == h.kappa);
  CHECK(same.dof == h.dof);
  CHECK((same.mu0 - h.mu0).norm() == 0.0);
  CHECK((same.psi - h.psi).norm() == 0.0);

  MatrixXd one(1, 2);
  one << 1.0, -1.0;
  NiwHyper upd = niw_posterior(h, one);
  CHECK(upd.kappa == 2.0);
  CHECK(upd.dof == 6.0);
  CHECK((upd.mu0 - h.mu0).norm() < 1e-14);
  CHECK((upd.psi - h.psi).norm() < 1e-14);

  MatrixXd row(1, 2);
  row << 3.0, 1.0;
  NiwHyper mid = niw_posterior(h, row);
  CHECK(mid.mu0[0] == doctest::Approx(2.0));
  CHECK(mid.mu0[1] == doctest::Approx(0.0));
}

TEST_CASE("niw posterior is associative over row batches") {
  Rng rng(157);
  NiwHyper h;
  h.mu0 = VectorXd::Zero(3);
  h.kappa = 0.5;
  h.dof = 6.0;
  h.psi = MatrixXd::Identity(3, 3);
  MatrixXd rows(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 3; ++j) rows(i, j) = rng.normal();
  NiwHyper batch = niw_posterior(h, rows);
  NiwHyper sequential = h;
  for (int i = 0; i < 10; ++i)
    sequential = niw_posterior(sequential, rows.row(i));
  CHECK(sequential.kappa == doctest::Approx(batch.kappa));
  CHECK(sequential.dof == doctest::Approx(batch.dof));
  CHECK((sequential.mu0 - batch.mu0).norm() < 1e-10);
  CHECK((sequential.psi - batch.psi).norm() < 1e-9);
}

TEST_CASE("niw sampled covariance matches the inverse-wishart mean") {
  Rng rng(163);
  NiwHyper h;
  h.mu0 = VectorXd::Zero(2);
  h.kappa = 2.0;
  h.dof = 8.0;
  h.psi.resize(2, 2);
  h.psi << 2.0, 0.5, 0.5, 1.0;
  MatrixXd mean_sigma = MatrixXd::Zero(2, 2);
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    auto [mu, sigma] = niw_sample(h, rng);
    mean_sigma += sigma;
  }
  mean_sigma /= N;
  MatrixXd expect = h.psi / (h.dof - 2 - 1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(mean_sigma(i, j) == doctest::Approx(expect(i, j)).epsilon(0.02));
}

TEST_CASE("truncated normal: negligible truncation and half-normal cases") {
  Rng rng(167);
  VectorXd mu(1);
  MatrixXd cov = MatrixXd::Identity(1, 1);
  mu << 10.0;
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i)
    mean += truncated_normal_sample(mu, cov, 0.0, rng)[0];
  CHECK(mean / 20000 == doctest::Approx(10.0).epsilon(0.005));

  mu << 0.0;
  mean = 0.0;
  for (int i = 0; i < 100000; ++i)
    mean += truncated_normal_sample(mu, cov, 0.0, rng)[0];
  CHECK(mean / 100000 == doctest::Approx(std::sqrt(2 / pi)).epsilon(0.01));
}

TEST_CASE("truncated normal: correlated bivariate vs rejection oracle") {
  Rng rng(173);
  VectorXd mu(2);
  mu << 0.5, -0.3;
  MatrixXd cov(2, 2);
  cov << 1.0, 0.7, 0.7, 1.5;
  const int N = 40000;
  VectorXd gibbs_mean = VectorXd::Zero(2), reject_mean = VectorXd::Zero(2);
  VectorXd gibbs_sq = VectorXd::Zero(2);
  for (int i = 0; i < N; ++i) {
    VectorXd g = truncated_normal_sample(mu, cov, 0.0, rng);
    CHECK(g.minCoeff() >= 0.0);
    gibbs_mean += g;
    gibbs_sq += g.cwiseProduct(g);
  }
  int kept = 0;
  while (kept < N) {
    VectorXd v = mvn_sample(mu, cov, rng);
    if (v.minCoeff() >= 0.0) {
      reject_mean += v;
      ++kept;
    }
  }
  gibbs_mean /= N;
  reject_mean /= N;
  for (int d = 0; d < 2; ++d) {
    const double sd =
        std::sqrt(gibbs_sq[d] / N - gibbs_mean[d] * gibbs_mean[d]);
    const double se = sd / std::sqrt(static_cast<double>(N));
    CHECK(std::fabs(gibbs_mean[d] - reject_mean[d]) < 3.5 * std::sqrt(2.0) * se);
  }
}

TEST_CASE("gem stick weights") {
  Rng rng(179);
  for (int rep = 0; rep < 200; ++rep) {
    auto w = gem_sample(2.0, 12, rng);
    double sum = 0.0;
    for (double v : w) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // tau -> 0: the first stick takes nearly everything
  std::vector<double> first(501);
  for (auto& v : first) v = gem_sample(0.01, 5, rng)[0];
  std::nth_element(first.begin(), first.begin() + 250, first.end());
  CHECK(first[250] > 0.9);
  // E[w1] = 1/(1+tau)
  const double tau = 3.0;
  double mean = 0.0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) mean += gem_sample(tau, 5, rng)[0];
  mean /= N;
  const double se = std::sqrt(tau / ((1 + tau) * (1 + tau) * (2 + tau)) / N);
  CHECK(std::fabs(mean - 1.0 / (1 + tau)) < 3 * se);
}

TEST_CASE("baseline densities: uniform limits and normalization") {
  CHECK(von_mises_logpdf(1.0, 2.0, 0.0) == doctest::Approx(-std::log(2 * pi)));
  CHECK(wrapped_cauchy_logpdf(1.0, 2.0, 0.0) ==
        doctest::Approx(-std::log(2 * pi)));
  const double mass = gauss_legendre(
      [](double v) { return std::exp(log_gamma_logpdf(v, 2.5, 0.7)); }, -20.0,
      8.0, 40);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  const double mass_w = gauss_legendre(
      [](double v) { return std::exp(log_weibull_logpdf(v, 1.8, 0.5)); }, -20.0,
      8.0, 40);
  CHECK(mass_w == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("baseline samplers match their densities (chi-squared)") {
  Rng rng(181);
  const int N = 40000;
  {
    std::vector<double> x(N);
    for (auto& v : x)
      v = baseline_linear_sample(LinearFamily::log_gamma, 2.0, 0.5, rng);
    auto density = [](double v) {
      return std::exp(log_gamma_logpdf(v, 2.0, 0.5));
    };
    CHECK(chi2_statistic(x, -4.0, 4.0, 40, density) < chi2_crit99(39));
  }
  {
    std::vector<double> x(N);
    for (auto& v : x)
      v = baseline_linear_sample(LinearFamily::log_weibull, 1.5, 0.8, rng);
    auto density = [](double v) {
      return std::exp(log_weibull_logpdf(v, 1.5, 0.8));
    };
    CHECK(chi2_statistic(x, -5.0, 3.0, 40, density) < chi2_crit99(39));
  }
}

TEST_CASE("baseline parameter validation") {
  BaselineEmissionParams p;
  p.circ_family = CircularFamily::wrapped_cauchy;
  p.circ_location = {1.0};
  p.circ_concentration = {1.2};  // out of [0, 1)
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.circ_concentration = {0.5};
  CHECK_NOTHROW(p.validate());
  p.lin_shape = {1.0};
  p.lin_rate = {-2.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("sampler/density consistency for the jpsn angle (chi-squared)") {
  Rng rng(191);
  JpsnParams p;
  p.n = 1;
  p.q = 0;
  p.mu = VectorXd(2);
  p.mu << 1.0, 0.5;
  p.sigma.resize(2, 2);
  p.sigma << 1.0, -0.3, -0.3, 1.8;
  p.lambda = VectorXd(0);
  const int N = 40000;
  std::vector<double> x(N);
  for (auto& v : x) v = jpsn_sample(p, rng).theta[0].value();
  auto density = [&](double t) {
    return std::exp(
        projected_normal_logpdf(Angle(t), p.mu, Eigen::Matrix2d(p.sigma)));
  };
  CHECK(chi2_statistic(x, 0.0, 2 * pi, 40, density) < chi2_crit99(39));
}
