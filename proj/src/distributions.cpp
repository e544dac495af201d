#include "jpsn/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "jpsn/special.hpp"

namespace jpsn {

namespace {
constexpr double log_2pi = 1.8378770664093454836;
constexpr double pi = std::numbers::pi;
}  // namespace

// ---------------------------------------------------------------------------
// JPSN
// ---------------------------------------------------------------------------

void JpsnParams::validate() const {
  if (n < 0 || q < 0 || n + q == 0)
    throw std::invalid_argument("JpsnParams: need n >= 0, q >= 0, n + q > 0");
  const int p = dim();
  if (mu.size() != p || sigma.rows() != p || sigma.cols() != p ||
      lambda.size() != q)
    throw std::invalid_argument("JpsnParams: dimension mismatch");
  if (!sigma.isApprox(sigma.transpose(), 1e-10))
    throw std::invalid_argument("JpsnParams: sigma is not symmetric");
  cholesky_pd(sigma, "JpsnParams");
}

JpsnAugmentedDraw jpsn_sample_augmented(const JpsnParams& params, Rng& rng) {
  params.validate();
  const int n = params.n, q = params.q;
  JpsnAugmentedDraw out;
  out.d.resize(q);
  for (int j = 0; j < q; ++j) out.d[j] = std::fabs(rng.normal());
  VectorXd x = mvn_sample(params.mu, params.sigma, rng);
  // Only the linear block carries skewness; the circular block's skew
  // entries are zero by construction.
  out.y = x.tail(q) + params.lambda.cwiseProduct(out.d);
  out.theta.resize(n);
  out.radius.resize(n);
  for (int i = 0; i < n; ++i) {
    PlanarPoint w{x[2 * i], x[2 * i + 1]};
    auto [angle, radius] = to_polar(w);
    out.theta[i] = angle;
    out.radius[i] = radius;
  }
  return out;
}

JpsnDraw jpsn_sample(const JpsnParams& params, Rng& rng) {
  JpsnAugmentedDraw a = jpsn_sample_augmented(params, rng);
  return {std::move(a.theta), std::move(a.y)};
}

double jpsn_augmented_logdensity(const std::vector<Angle>& theta,
                                 const VectorXd& radius, const VectorXd& y,
                                 const VectorXd& d, const JpsnParams& params) {
  const int n = params.n, q = params.q;
  if (static_cast<int>(theta.size()) != n || radius.size() != n ||
      y.size() != q || d.size() != q)
    throw std::invalid_argument("jpsn_augmented_logdensity: dimension mismatch");
  double log_jac = 0.0;
  VectorXd x(params.dim());
  for (int i = 0; i < n; ++i) {
    if (!(radius[i] > 0.0))
      throw std::invalid_argument("jpsn_augmented_logdensity: radius must be positive");
    x[2 * i] = radius[i] * std::cos(theta[i].value());
    x[2 * i + 1] = radius[i] * std::sin(theta[i].value());
    log_jac += std::log(radius[i]);
  }
  double log_hn = 0.0;
  for (int j = 0; j < q; ++j) {
    if (d[j] < 0.0)
      throw std::invalid_argument("jpsn_augmented_logdensity: d must be nonnegative");
    x[2 * n + j] = y[j] - params.lambda[j] * d[j];
    log_hn += -0.5 * (d[j] * d[j] + log_2pi);
  }
  return q * std::numbers::ln2 + mvn_logpdf(x, params.mu, params.sigma) +
         log_hn + log_jac;
}

// ---------------------------------------------------------------------------
// Skew normal
// ---------------------------------------------------------------------------

SkewNormalDerived skew_normal_derived(const MatrixXd& sigma_y,
                                      const VectorXd& lambda) {
  const int q = static_cast<int>(lambda.size());
  MatrixXd lam = lambda.asDiagonal();
  SkewNormalDerived out;
  out.upsilon = sigma_y + lam * lam;
  auto llt = cholesky_pd(out.upsilon, "skew_normal_derived");
  out.gamma_mat = MatrixXd::Identity(q, q) - lam * llt.solve(MatrixXd(lam));
  out.gamma_mat = 0.5 * (out.gamma_mat + out.gamma_mat.transpose()).eval();
  return out;
}

namespace {

// P(Z1 <= h1, Z2 <= h2) for correlated standard bivariate normal via
// quadrature of phi(z) * Phi((h2 - r z) / sqrt(1 - r^2)).
double binorm_cdf(double h1, double h2, double r) {
  if (r > 0.999999) return norm_cdf(std::min(h1, h2));
  if (r < -0.999999) {
    const double v = norm_cdf(h1) + norm_cdf(h2) - 1.0;
    return std::max(v, 0.0);
  }
  const double s = std::sqrt(1.0 - r * r);
  const double lo = std::min(-8.5, h1 - 1.0);
  if (h1 < -8.5) return 0.0;
  return gauss_legendre(
      [&](double z) { return norm_pdf(z) * norm_cdf((h2 - r * z) / s); }, lo,
      h1, 24);
}

// Monte Carlo orthant probability P(Z <= x) for Z ~ N(0, gamma_mat),
// deterministic via a fixed internal seed.
double mvn_cdf_mc(const VectorXd& x, const MatrixXd& gamma_mat) {
  const int q = static_cast<int>(x.size());
  auto llt = cholesky_pd(gamma_mat, "mvn_cdf_mc");
  Rng rng(0x9e3779b97f4a7c15ULL);
  const int draws = 200000;
  int hits = 0;
  VectorXd z(q);
  for (int it = 0; it < draws; ++it) {
    for (int i = 0; i < q; ++i) z[i] = rng.normal();
    VectorXd v = llt.matrixL() * z;
    bool inside = true;
    for (int i = 0; i < q; ++i)
      if (v[i] > x[i]) {
        inside = false;
        break;
      }
    if (inside) ++hits;
  }
  return static_cast<double>(hits) / draws;
}

}  // namespace

double skew_normal_logpdf(const VectorXd& y, const VectorXd& mu_y,
                          const MatrixXd& sigma_y, const VectorXd& lambda) {
  const int q = static_cast<int>(y.size());
  if (mu_y.size() != q || sigma_y.rows() != q || lambda.size() != q)
    throw std::invalid_argument("skew_normal_logpdf: dimension mismatch");
  if (lambda.isZero(0.0)) return mvn_logpdf(y, mu_y, sigma_y);

  SkewNormalDerived der = skew_normal_derived(sigma_y, lambda);
  const double log_norm_part = mvn_logpdf(y, mu_y, der.upsilon);
  auto ups_llt = cholesky_pd(der.upsilon, "skew_normal_logpdf");
  VectorXd arg = lambda.asDiagonal() * ups_llt.solve(y - mu_y);

  double log_cdf;
  if (q == 1) {
    log_cdf = log_norm_cdf(arg[0] / std::sqrt(der.gamma_mat(0, 0)));
  } else if (q == 2) {
    const double s1 = std::sqrt(der.gamma_mat(0, 0));
    const double s2 = std::sqrt(der.gamma_mat(1, 1));
    const double r = der.gamma_mat(0, 1) / (s1 * s2);
    log_cdf = std::log(std::max(binorm_cdf(arg[0] / s1, arg[1] / s2, r), 1e-310));
  } else {
    log_cdf = std::log(std::max(mvn_cdf_mc(arg, der.gamma_mat), 1e-310));
  }
  return q * std::numbers::ln2 + log_norm_part + log_cdf;
}

VectorXd skew_normal_sample(const VectorXd& mu_y, const MatrixXd& sigma_y,
                            const VectorXd& lambda, Rng& rng) {
  const int q = static_cast<int>(mu_y.size());
  VectorXd d(q);
  for (int j = 0; j < q; ++j) d[j] = std::fabs(rng.normal());
  return mvn_sample(mu_y, sigma_y, rng) + lambda.cwiseProduct(d);
}

std::pair<VectorXd, MatrixXd> skew_normal_moments(const VectorXd& mu_y,
                                                  const MatrixXd& sigma_y,
                                                  const VectorXd& lambda) {
  VectorXd mean = mu_y + lambda * std::sqrt(2.0 / pi);
  MatrixXd lam = lambda.asDiagonal();
  MatrixXd cov = sigma_y + (1.0 - 2.0 / pi) * lam * lam;
  return {mean, cov};
}

// ---------------------------------------------------------------------------
// Projected normal
// ---------------------------------------------------------------------------

double projected_normal_logpdf(Angle theta, const Eigen::Vector2d& mu_w,
                               const Eigen::Matrix2d& sigma_w) {
  const double det = sigma_w.determinant();
  if (!(det > 0.0) || !(sigma_w(0, 0) > 0.0))
    throw std::runtime_error("projected_normal_logpdf: sigma_w not positive definite");
  Eigen::Matrix2d prec = sigma_w.inverse();
  const Eigen::Vector2d u(std::cos(theta.value()), std::sin(theta.value()));
  const double a = u.dot(prec * u);
  const double b = u.dot(prec * mu_w);
  const double c = mu_w.dot(prec * mu_w);
  // Integrate r * exp(-(a r^2 - 2 b r + c)/2) over r > 0. The integrand
  // is a Gaussian bump of scale 1/sqrt(a) around the positive root of
  // a r^2 - b r - 1 = 0; twelve scales past it the mass is negligible.
  const double peak = (b + std::sqrt(b * b + 4.0 * a)) / (2.0 * a);
  const double scale = 1.0 / std::sqrt(a);
  const double hi = peak + 12.0 * scale;
  const double integral = gauss_legendre(
      [&](double r) {
        return r * std::exp(-0.5 * (a * r * r - 2.0 * b * r + c));
      },
      0.0, hi, 24);
  if (!(integral > 0.0))
    throw std::runtime_error("projected_normal_logpdf: quadrature failed");
  return std::log(integral) - std::log(2.0 * pi) - 0.5 * std::log(det);
}

// ---------------------------------------------------------------------------
// Normal inverse Wishart
// ---------------------------------------------------------------------------

void NiwHyper::validate() const {
  const int p = dim();
  if (p == 0) throw std::invalid_argument("NiwHyper: empty mean");
  if (psi.rows() != p || psi.cols() != p)
    throw std::invalid_argument("NiwHyper: psi dimension mismatch");
  if (!(kappa > 0.0)) throw std::invalid_argument("NiwHyper: kappa must be positive");
  if (!(dof > p - 1)) throw std::invalid_argument("NiwHyper: dof must exceed dim - 1");
  cholesky_pd(psi, "NiwHyper");
}

std::pair<VectorXd, MatrixXd> niw_sample(const NiwHyper& h, Rng& rng) {
  h.validate();
  const int p = h.dim();
  // Sigma ~ IW(dof, psi) via a Bartlett-decomposed Wishart(dof, psi^-1).
  auto psi_llt = cholesky_pd(h.psi, "niw_sample");
  MatrixXd a = MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(h.dof - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // W = L^-T A A' L^-1 with psi = L L'  =>  Sigma = W^-1 = L A^-T A^-1 L'.
  MatrixXd ainv_lt = a.triangularView<Eigen::Lower>().solve(
      MatrixXd(psi_llt.matrixL().transpose()));
  MatrixXd sigma = ainv_lt.transpose() * ainv_lt;
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  VectorXd mu = mvn_sample(h.mu0, sigma / h.kappa, rng);
  return {mu, sigma};
}

NiwHyper niw_posterior(const NiwHyper& h, const MatrixXd& rows) {
  h.validate();
  const int t = static_cast<int>(rows.rows());
  if (t == 0) return h;
  if (rows.cols() != h.dim())
    throw std::invalid_argument("niw_posterior: row dimension mismatch");
  VectorXd xbar = rows.colwise().mean();
  MatrixXd centered = rows.rowwise() - xbar.transpose();
  MatrixXd scatter = centered.transpose() * centered;
  VectorXd diff = xbar - h.mu0;
  NiwHyper out;
  out.kappa = h.kappa + t;
  out.dof = h.dof + t;
  out.mu0 = (h.kappa * h.mu0 + t * xbar) / out.kappa;
  out.psi = h.psi + scatter + (h.kappa * t / out.kappa) * (diff * diff.transpose());
  out.psi = 0.5 * (out.psi + out.psi.transpose()).eval();
  return out;
}

// ---------------------------------------------------------------------------
// Truncated normal
// ---------------------------------------------------------------------------

VectorXd truncated_normal_sample(const VectorXd& mean, const MatrixXd& cov,
                                 double lower, Rng& rng, int scans,
                                 const VectorXd* init) {
  const int q = static_cast<int>(mean.size());
  if (q == 1) {
    VectorXd out(1);
    out[0] = rng.truncated_normal_lower(mean[0], std::sqrt(cov(0, 0)), lower);
    return out;
  }
  MatrixXd prec = cholesky_pd(cov, "truncated_normal_sample")
                      .solve(MatrixXd::Identity(q, q));
  VectorXd x = init != nullptr ? *init : mean.cwiseMax(lower + 1e-3);
  for (int i = 0; i < q; ++i) x[i] = std::max(x[i], lower);
  for (int s = 0; s < scans; ++s) {
    for (int i = 0; i < q; ++i) {
      // x_i | x_-i is normal with precision prec(i,i).
      double shift = 0.0;
      for (int j = 0; j < q; ++j)
        if (j != i) shift += prec(i, j) * (x[j] - mean[j]);
      const double cond_mean = mean[i] - shift / prec(i, i);
      const double cond_sd = 1.0 / std::sqrt(prec(i, i));
      x[i] = rng.truncated_normal_lower(cond_mean, cond_sd, lower);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Stick-breaking
// ---------------------------------------------------------------------------

std::vector<double> gem_sample(double tau, int truncation, Rng& rng) {
  if (!(tau > 0.0) || truncation < 1)
    throw std::invalid_argument("gem_sample: need tau > 0 and truncation >= 1");
  std::vector<double> w(truncation);
  double stick = 1.0;
  for (int k = 0; k + 1 < truncation; ++k) {
    const double v = rng.beta(1.0, tau);
    w[k] = v * stick;
    stick *= 1.0 - v;
  }
  w[truncation - 1] = stick;
  return w;
}

// ---------------------------------------------------------------------------
// Baseline families
// ---------------------------------------------------------------------------

void BaselineEmissionParams::validate() const {
  if (circ_location.size() != circ_concentration.size() ||
      lin_shape.size() != lin_rate.size())
    throw std::invalid_argument("BaselineEmissionParams: dimension mismatch");
  for (std::size_t i = 0; i < circ_location.size(); ++i) {
    const double c = circ_concentration[i];
    if (circ_family == CircularFamily::von_mises ? !(c >= 0.0)
                                                 : !(c >= 0.0 && c < 1.0))
      throw std::invalid_argument("BaselineEmissionParams: concentration out of domain");
  }
  for (std::size_t j = 0; j < lin_shape.size(); ++j)
    if (!(lin_shape[j] > 0.0) || !(lin_rate[j] > 0.0))
      throw std::invalid_argument("BaselineEmissionParams: shape/rate must be positive");
}

double von_mises_logpdf(double theta, double location, double concentration) {
  if (!(concentration >= 0.0))
    throw std::invalid_argument("von_mises_logpdf: concentration must be >= 0");
  return concentration * std::cos(theta - location) -
         std::log(2.0 * pi) - log_bessel_i0(concentration);
}

double wrapped_cauchy_logpdf(double theta, double location, double rho_wc) {
  if (!(rho_wc >= 0.0 && rho_wc < 1.0))
    throw std::invalid_argument("wrapped_cauchy_logpdf: rho must lie in [0,1)");
  const double r2 = rho_wc * rho_wc;
  return std::log(1.0 - r2) - std::log(2.0 * pi) -
         std::log(1.0 + r2 - 2.0 * rho_wc * std::cos(theta - location));
}

double log_gamma_logpdf(double v, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("log_gamma_logpdf: shape/rate must be positive");
  return shape * std::log(rate) - std::lgamma(shape) + shape * v -
         rate * std::exp(v);
}

double log_weibull_logpdf(double v, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("log_weibull_logpdf: shape/rate must be positive");
  return std::log(shape) + shape * std::log(rate) + shape * v -
         std::pow(rate * std::exp(v), shape);
}

double baseline_circular_logpdf(CircularFamily f, double theta, double location,
                                double concentration) {
  return f == CircularFamily::von_mises
             ? von_mises_logpdf(theta, location, concentration)
             : wrapped_cauchy_logpdf(theta, location, concentration);
}

double baseline_linear_logpdf(LinearFamily f, double v, double shape,
                              double rate) {
  return f == LinearFamily::log_gamma ? log_gamma_logpdf(v, shape, rate)
                                      : log_weibull_logpdf(v, shape, rate);
}

double baseline_circular_sample(CircularFamily f, double location,
                                double concentration, Rng& rng) {
  return f == CircularFamily::von_mises
             ? rng.von_mises(location, concentration)
             : rng.wrapped_cauchy(location, concentration);
}

double baseline_linear_sample(LinearFamily f, double shape, double rate,
                              Rng& rng) {
  if (f == LinearFamily::log_gamma) return std::log(rng.gamma(shape) / rate);
  return std::log(rng.weibull(shape, rate));
}

}  // namespace jpsn
