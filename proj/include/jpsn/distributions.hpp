#ifndef JPSN_DISTRIBUTIONS_HPP
#define JPSN_DISTRIBUTIONS_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "jpsn/angle.hpp"
#include "jpsn/mvn.hpp"
#include "jpsn/rng.hpp"

namespace jpsn {

// ---------------------------------------------------------------------------
// Joint projected and skew normal parameters
// ---------------------------------------------------------------------------

/// Parameters of an (n, q)-variate joint projected and skew normal, on the
/// unidentified scale. mu stacks the 2n planar coordinates of the circular
/// block before the q linear ones; sigma is the full (2n+q) covariance;
/// lambda is the diagonal of the skew matrix acting on the linear block.
struct JpsnParams {
  int n = 0;  // circular components
  int q = 0;  // linear components
  VectorXd mu;
  MatrixXd sigma;
  VectorXd lambda;

  int dim() const { return 2 * n + q; }
  void validate() const;

  // Blocks of sigma in the (w, y) layout.
  MatrixXd sigma_w() const { return sigma.topLeftCorner(2 * n, 2 * n); }
  MatrixXd sigma_wy() const { return sigma.topRightCorner(2 * n, q); }
  MatrixXd sigma_y() const { return sigma.bottomRightCorner(q, q); }
  VectorXd mu_w() const { return mu.head(2 * n); }
  VectorXd mu_y() const { return mu.tail(q); }
};

/// One draw (angles, linear values) from the JPSN.
struct JpsnDraw {
  std::vector<Angle> theta;
  VectorXd y;
};

JpsnDraw jpsn_sample(const JpsnParams& params, Rng& rng);

/// Joint draw including the latent planar points and skew latents, for
/// samplers that need the augmented state.
struct JpsnAugmentedDraw {
  std::vector<Angle> theta;
  VectorXd radius;  // length n
  VectorXd y;
  VectorXd d;  // length q, nonnegative
};

JpsnAugmentedDraw jpsn_sample_augmented(const JpsnParams& params, Rng& rng);

/// Log of the augmented joint density of (theta, r, y, d): the (2n+q)-variate
/// normal evaluated at (w, y - diag(lambda) d) with w_i = r_i (cos, sin)
/// theta_i, times the half-normal density of d, times the polar Jacobian
/// prod_i r_i.
double jpsn_augmented_logdensity(const std::vector<Angle>& theta,
                                 const VectorXd& radius, const VectorXd& y,
                                 const VectorXd& d, const JpsnParams& params);

// ---------------------------------------------------------------------------
// Skew normal (diagonal skew matrix)
// ---------------------------------------------------------------------------

/// Derived matrices of the skew normal density: Upsilon = Sigma + L L' and
/// Gamma = I - L' Upsilon^-1 L with L = diag(lambda).
struct SkewNormalDerived {
  MatrixXd upsilon;
  MatrixXd gamma_mat;
};

SkewNormalDerived skew_normal_derived(const MatrixXd& sigma_y,
                                      const VectorXd& lambda);

/// Density of the q-variate skew normal. Exact for lambda = 0 (any q),
/// q = 1 and q = 2; for q >= 3 with nonzero skewness the normal-CDF factor
/// is estimated by a fixed-seed Monte Carlo orthant probability (abs error
/// about 1e-3 in the CDF).
double skew_normal_logpdf(const VectorXd& y, const VectorXd& mu_y,
                          const MatrixXd& sigma_y, const VectorXd& lambda);

VectorXd skew_normal_sample(const VectorXd& mu_y, const MatrixXd& sigma_y,
                            const VectorXd& lambda, Rng& rng);

/// Mean and covariance: E(Y) = mu + lambda sqrt(2/pi),
/// Var(Y) = Sigma + (1 - 2/pi) diag(lambda)^2 (coefficient validated against
/// the sampler by a Monte Carlo oracle).
std::pair<VectorXd, MatrixXd> skew_normal_moments(const VectorXd& mu_y,
                                                  const MatrixXd& sigma_y,
                                                  const VectorXd& lambda);

// ---------------------------------------------------------------------------
// Projected normal (univariate marginal)
// ---------------------------------------------------------------------------

/// Log-density of the angle of a bivariate N(mu_w, sigma_w), computed by
/// Gauss-Legendre quadrature of the polar-coordinates joint over the radius.
double projected_normal_logpdf(Angle theta, const Eigen::Vector2d& mu_w,
                               const Eigen::Matrix2d& sigma_w);

// ---------------------------------------------------------------------------
// Normal inverse Wishart
// ---------------------------------------------------------------------------

struct NiwHyper {
  VectorXd mu0;
  double kappa = 1.0;  // prior precision scale on the mean
  double dof = 0.0;    // inverse-Wishart degrees of freedom
  MatrixXd psi;        // inverse-Wishart scale matrix

  int dim() const { return static_cast<int>(mu0.size()); }
  void validate() const;
};

/// One draw (mean, covariance): Sigma ~ IW(dof, psi), mu | Sigma ~
/// N(mu0, Sigma / kappa).
std::pair<VectorXd, MatrixXd> niw_sample(const NiwHyper& h, Rng& rng);

/// Conjugate update from data rows (one row per observation).
NiwHyper niw_posterior(const NiwHyper& h, const MatrixXd& rows);

// ---------------------------------------------------------------------------
// Truncated normal (componentwise support [lower, inf))
// ---------------------------------------------------------------------------

/// Draw from N(mean, cov) restricted to x >= lower componentwise. The
/// univariate case is an exact inverse-CDF draw; the multivariate case runs
/// `scans` coordinate Gibbs passes (exact conditionals) from `init` or from
/// a feasible default start.
VectorXd truncated_normal_sample(const VectorXd& mean, const MatrixXd& cov,
                                 double lower, Rng& rng, int scans = 40,
                                 const VectorXd* init = nullptr);

// ---------------------------------------------------------------------------
// Stick-breaking
// ---------------------------------------------------------------------------

/// GEM stick-breaking weights truncated to length L: the first L-1 entries
/// come from Beta(1, tau) sticks, the last absorbs the remainder.
std::vector<double> gem_sample(double tau, int truncation, Rng& rng);

// ---------------------------------------------------------------------------
// Baseline emission families (independent components)
// ---------------------------------------------------------------------------

enum class CircularFamily { von_mises, wrapped_cauchy };
enum class LinearFamily { log_gamma, log_weibull };

/// Per-state parameters of one of the four baseline emissions: independent
/// circular and linear components.
struct BaselineEmissionParams {
  CircularFamily circ_family = CircularFamily::von_mises;
  LinearFamily lin_family = LinearFamily::log_gamma;
  // Per circular variable: location in [0, 2 pi) and a concentration
  // (von Mises kappa > 0, or wrapped-Cauchy mean resultant length in [0,1)).
  std::vector<double> circ_location;
  std::vector<double> circ_concentration;
  // Per linear variable: shape and rate of the underlying positive variable.
  std::vector<double> lin_shape;
  std::vector<double> lin_rate;

  void validate() const;
};

double von_mises_logpdf(double theta, double location, double concentration);
double wrapped_cauchy_logpdf(double theta, double location, double rho_wc);
/// Density of log X where X ~ Gamma(shape, rate).
double log_gamma_logpdf(double v, double shape, double rate);
/// Density of log X where X ~ Weibull(shape, rate), rate = 1/scale.
double log_weibull_logpdf(double v, double shape, double rate);

double baseline_circular_logpdf(CircularFamily f, double theta, double location,
                                double concentration);
double baseline_linear_logpdf(LinearFamily f, double v, double shape,
                              double rate);
double baseline_circular_sample(CircularFamily f, double location,
                                double concentration, Rng& rng);
double baseline_linear_sample(LinearFamily f, double shape, double rate,
                              Rng& rng);

}  // namespace jpsn

#endif  // JPSN_DISTRIBUTIONS_HPP
