#include "jpsn/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jpsn {

namespace {
constexpr double log_2pi = 1.8378770664093454836;
}

EmissionFamilyKind parse_family(const std::string& name) {
  if (name == "jpsn") return EmissionFamilyKind::jpsn;
  if (name == "vmlg") return EmissionFamilyKind::vmlg;
  if (name == "vmlw") return EmissionFamilyKind::vmlw;
  if (name == "wclg") return EmissionFamilyKind::wclg;
  if (name == "wclw") return EmissionFamilyKind::wclw;
  throw std::invalid_argument(
      "unknown emission family '" + name +
      "' (choose one of: jpsn, vmlg, vmlw, wclg, wclw)");
}

std::string family_name(EmissionFamilyKind f) {
  switch (f) {
    case EmissionFamilyKind::jpsn: return "jpsn";
    case EmissionFamilyKind::vmlg: return "vmlg";
    case EmissionFamilyKind::vmlw: return "vmlw";
    case EmissionFamilyKind::wclg: return "wclg";
    case EmissionFamilyKind::wclw: return "wclw";
  }
  return "?";
}

void FitConfig::validate() const {
  if (iterations < 1 || burnin < 0 || thin < 1)
    throw std::invalid_argument("FitConfig: iterations, thin must be positive");
  if (burnin >= iterations)
    throw std::invalid_argument("FitConfig: burnin must be smaller than iterations");
  if (initial_states < 1)
    throw std::invalid_argument("FitConfig: initial_states must be positive");
  if (weak_limit && truncation < 1)
    throw std::invalid_argument("FitConfig: truncation must be positive");
  if (!(niw_kappa > 0.0) || !(niw_psi_scale > 0.0) || !(lambda_prior_var > 0.0))
    throw std::invalid_argument("FitConfig: prior scales must be positive");
  shdp.validate();
}

// ---------------------------------------------------------------------------
// Conditional pieces
// ---------------------------------------------------------------------------

ConditionalCache make_conditional_cache(const JpsnParams& params) {
  const int n = params.n, q = params.q, p = params.dim();
  ConditionalCache c;
  c.sigma_llt = cholesky_pd(params.sigma, "make_conditional_cache");
  c.sigma_inv = c.sigma_llt.solve(MatrixXd::Identity(p, p));
  if (q > 0) {
    if (n > 0) {
      auto w_llt = cholesky_pd(params.sigma_w(), "make_conditional_cache(w)");
      c.w_to_y = w_llt.solve(params.sigma_wy()).transpose();
      c.sigma_ygw = params.sigma_y() - c.w_to_y * params.sigma_wy();
      c.sigma_ygw = 0.5 * (c.sigma_ygw + c.sigma_ygw.transpose()).eval();
    } else {
      c.w_to_y.resize(q, 0);
      c.sigma_ygw = params.sigma_y();
    }
    auto ygw_llt = cholesky_pd(c.sigma_ygw, "make_conditional_cache(y|w)");
    c.sigma_ygw_inv = ygw_llt.solve(MatrixXd::Identity(q, q));
    c.lam_t_sygw_inv = params.lambda.asDiagonal() * c.sigma_ygw_inv;
    MatrixXd vd_inv = c.lam_t_sygw_inv * MatrixXd(params.lambda.asDiagonal()) +
                      MatrixXd::Identity(q, q);
    c.v_d = cholesky_pd(0.5 * (vd_inv + vd_inv.transpose()),
                        "make_conditional_cache(v_d)")
                .solve(MatrixXd::Identity(q, q));
    c.v_d = 0.5 * (c.v_d + c.v_d.transpose()).eval();
  }
  return c;
}

std::pair<VectorXd, MatrixXd> update_mu_sigma(const NiwHyper& prior,
                                              const MatrixXd& rows, Rng& rng) {
  return niw_sample(niw_posterior(prior, rows), rng);
}

VectorXd update_lambda(const VectorXd& prior_mean, const MatrixXd& prior_cov,
                       const MatrixXd& sigma_ygw_inv, const MatrixXd& d_rows,
                       const MatrixXd& resid_rows, Rng& rng) {
  const int q = static_cast<int>(prior_mean.size());
  MatrixXd prec = cholesky_pd(prior_cov, "update_lambda")
                      .solve(MatrixXd::Identity(q, q));
  VectorXd shift = prec * prior_mean;
  for (Eigen::Index t = 0; t < d_rows.rows(); ++t) {
    const VectorXd d = d_rows.row(t);
    prec += d.asDiagonal() * sigma_ygw_inv * MatrixXd(d.asDiagonal());
    shift += d.asDiagonal() * (sigma_ygw_inv * resid_rows.row(t).transpose());
  }
  prec = 0.5 * (prec + prec.transpose()).eval();
  auto llt = cholesky_pd(prec, "update_lambda(posterior)");
  VectorXd mean = llt.solve(shift);
  VectorXd zvec(q);
  for (int i = 0; i < q; ++i) zvec[i] = rng.normal();
  return mean + llt.matrixU().solve(zvec);
}

VectorXd update_d(const ConditionalCache& cache, const VectorXd& lambda,
                  const VectorXd& y_t, const VectorXd& mu_ygw_t,
                  const VectorXd& current, Rng& rng) {
  const int q = static_cast<int>(lambda.size());
  VectorXd mean = cache.v_d * (cache.lam_t_sygw_inv * (y_t - mu_ygw_t));
  return truncated_normal_sample(mean, cache.v_d, 0.0, rng, q == 1 ? 1 : 8,
                                 &current);
}

// ---------------------------------------------------------------------------
// JpsnEmission
// ---------------------------------------------------------------------------

JpsnEmission::JpsnEmission(const CircLinSeries& data, JpsnPrior prior,
                           int states, Rng& rng)
    : n_(data.n()),
      q_(data.q()),
      work_(data),
      theta_missing_(data.theta_missing),
      y_missing_(data.y_missing),
      prior_(std::move(prior)) {
  const int T = data.T();
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n_; ++i)
      if (theta_missing_(t, i)) work_.theta(t, i) = rng.uniform(0.0, two_pi);
    for (int j = 0; j < q_; ++j)
      if (y_missing_(t, j)) work_.y(t, j) = 0.0;
  }
  r_ = MatrixXd::Ones(T, n_);
  d_.resize(T, q_);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < q_; ++j) d_(t, j) = std::fabs(rng.normal());
  w_.resize(T, 2 * n_);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n_; ++i) {
      w_(t, 2 * i) = r_(t, i) * std::cos(work_.theta(t, i));
      w_(t, 2 * i + 1) = r_(t, i) * std::sin(work_.theta(t, i));
    }
  prop_scale_.assign(std::max(n_, 1), 1.0);
  accept_.assign(std::max(n_, 1), 0);
  propose_.assign(std::max(n_, 1), 0);
  constructing_ = true;
  for (int k = 0; k < states; ++k) append_state_from_prior(rng);
  constructing_ = false;
}

void JpsnEmission::reset_params_from_prior(Rng& rng) {
  for (auto& s : states_) {
    auto [mu, sigma] = niw_sample(prior_.niw, rng);
    s.mu = mu;
    s.sigma = sigma;
    s.lambda = q_ > 0 ? mvn_sample(prior_.lambda_mean, prior_.lambda_cov, rng)
                      : VectorXd(0);
  }
  for (int k = 0; k < n_states(); ++k) refresh_cache(k);
}

void JpsnEmission::append_state_from_prior(Rng& rng) {
  JpsnParams s;
  s.n = n_;
  s.q = q_;
  auto [mu, sigma] = niw_sample(prior_.niw, rng);
  s.mu = mu;
  s.sigma = sigma;
  s.lambda = VectorXd::Zero(q_);
  if (q_ > 0 && !constructing_) {
    // States instantiated mid-run are prior draws of the full psi_k; the
    // zero lambda applies only to the cold-start initialization.
    s.lambda = mvn_sample(prior_.lambda_mean, prior_.lambda_cov, rng);
  }
  states_.push_back(std::move(s));
  caches_.emplace_back();
  refresh_cache(n_states() - 1);
}

void JpsnEmission::keep_states(const std::vector<int>& keep) {
  std::vector<JpsnParams> ns;
  std::vector<ConditionalCache> nc;
  ns.reserve(keep.size());
  for (int k : keep) {
    ns.push_back(std::move(states_[k]));
    nc.push_back(std::move(caches_[k]));
  }
  states_ = std::move(ns);
  caches_ = std::move(nc);
}

void JpsnEmission::set_state_params(int k, const JpsnParams& p) {
  states_[k] = p;
  refresh_cache(k);
}

void JpsnEmission::refresh_cache(int k) {
  caches_[k] = make_conditional_cache(states_[k]);
}

VectorXd JpsnEmission::augmented_row(int t, int k) const {
  VectorXd x(2 * n_ + q_);
  x.head(2 * n_) = w_.row(t);
  if (q_ > 0)
    x.tail(q_) = work_.y.row(t).transpose() -
                 states_[k].lambda.cwiseProduct(d_.row(t).transpose());
  return x;
}

double JpsnEmission::loglik(int t, int k) const {
  return mvn_logpdf_chol(augmented_row(t, k), states_[k].mu,
                         caches_[k].sigma_llt);
}

void JpsnEmission::update_params(const std::vector<std::vector<int>>& groups,
                                 Rng& rng) {
  const int K = n_states();
  const int p = 2 * n_ + q_;
  for (int k = 0; k < K; ++k) {
    const auto& ts = groups[k];
    MatrixXd rows(ts.size(), p);
    for (std::size_t idx = 0; idx < ts.size(); ++idx)
      rows.row(idx) = augmented_row(ts[idx], k);
    auto [mu, sigma] = update_mu_sigma(prior_.niw, rows, rng);
    states_[k].mu = mu;
    states_[k].sigma = sigma;
    refresh_cache(k);
  }
  if (q_ == 0) return;
  for (int k = 0; k < K; ++k) {
    const auto& ts = groups[k];
    const auto& cache = caches_[k];
    const VectorXd mu_w = states_[k].mu.head(2 * n_);
    const VectorXd mu_y = states_[k].mu.tail(q_);
    MatrixXd d_rows(ts.size(), q_), resid_rows(ts.size(), q_);
    for (std::size_t idx = 0; idx < ts.size(); ++idx) {
      const int t = ts[idx];
      d_rows.row(idx) = d_.row(t);
      VectorXd mu_ygw =
          n_ > 0 ? (mu_y + cache.w_to_y * (w_.row(t).transpose() - mu_w)).eval()
                 : mu_y;
      resid_rows.row(idx) = work_.y.row(t).transpose() - mu_ygw;
    }
    states_[k].lambda =
        update_lambda(prior_.lambda_mean, prior_.lambda_cov,
                      cache.sigma_ygw_inv, d_rows, resid_rows, rng);
    refresh_cache(k);
  }
}

void JpsnEmission::update_d_all(const std::vector<int>& z, Rng& rng) {
  if (q_ == 0) return;
  const int T = work_.T();
  for (int t = 0; t < T; ++t) {
    const int k = z[t];
    const auto& cache = caches_[k];
    const VectorXd mu_y = states_[k].mu.tail(q_);
    VectorXd mu_ygw =
        n_ > 0 ? (mu_y + cache.w_to_y *
                             (w_.row(t).transpose() - states_[k].mu.head(2 * n_)))
                     .eval()
               : mu_y;
    VectorXd cur = d_.row(t);
    d_.row(t) = update_d(cache, states_[k].lambda, work_.y.row(t), mu_ygw, cur,
                         rng);
  }
}

void JpsnEmission::update_r(const std::vector<int>& z, Rng& rng) {
  if (n_ == 0) return;
  const int T = work_.T();
  std::vector<long> sweep_acc(n_, 0), sweep_prop(n_, 0);
  VectorXd x(2 * n_ + q_);
  for (int t = 0; t < T; ++t) {
    const int k = z[t];
    const auto& Q = caches_[k].sigma_inv;
    const VectorXd& mu = states_[k].mu;
    x = augmented_row(t, k);
    for (int i = 0; i < n_; ++i) {
      const double r_old = r_(t, i);
      const double log_r_old = std::log(r_old);
      const double log_r_new = log_r_old + prop_scale_[i] * rng.normal();
      const double r_new = std::exp(log_r_new);
      const double c0 = x[2 * i], c1 = x[2 * i + 1];
      VectorXd diff = x - mu;
      const double quad_old = diff.dot(Q * diff);
      x[2 * i] = c0 * (r_new / r_old);
      x[2 * i + 1] = c1 * (r_new / r_old);
      diff = x - mu;
      const double quad_new = diff.dot(Q * diff);
      // Target carries the polar Jacobian r; the log-normal walk adds
      // another log r' - log r.
      const double log_acc =
          -0.5 * (quad_new - quad_old) + 2.0 * (log_r_new - log_r_old);
      ++sweep_prop[i];
      if (std::log(rng.uniform()) < log_acc) {
        ++sweep_acc[i];
        r_(t, i) = r_new;
        w_(t, 2 * i) = x[2 * i];
        w_(t, 2 * i + 1) = x[2 * i + 1];
      } else {
        x[2 * i] = c0;
        x[2 * i + 1] = c1;
      }
    }
  }
  ++sweep_no_;
  for (int i = 0; i < n_; ++i) {
    accept_[i] += sweep_acc[i];
    propose_[i] += sweep_prop[i];
    if (adapt_ && sweep_prop[i] > 0) {
      const double rate = static_cast<double>(sweep_acc[i]) / sweep_prop[i];
      const double step = 1.5 / std::pow(1.0 + sweep_no_, 0.6);
      prop_scale_[i] = std::clamp(prop_scale_[i] * std::exp(step * (rate - 0.35)),
                                  0.01, 20.0);
    }
  }
}

void JpsnEmission::update_latents(const std::vector<int>& z, Rng& rng) {
  update_d_all(z, rng);
  update_r(z, rng);
}

double JpsnEmission::acceptance_rate(int i) const {
  return propose_[i] > 0 ? static_cast<double>(accept_[i]) / propose_[i] : 0.0;
}

void JpsnEmission::set_proposal_scale(double s) {
  for (auto& v : prop_scale_) v = s;
}

void JpsnEmission::impute_missing(const std::vector<int>& z, Rng& rng) {
  const int T = work_.T();
  const int p = 2 * n_ + q_;
  std::vector<int> mis, obs;
  for (int t = 0; t < T; ++t) {
    mis.clear();
    obs.clear();
    for (int i = 0; i < n_; ++i) {
      if (theta_missing_(t, i)) {
        mis.push_back(2 * i);
        mis.push_back(2 * i + 1);
      } else {
        obs.push_back(2 * i);
        obs.push_back(2 * i + 1);
      }
    }
    for (int j = 0; j < q_; ++j)
      (y_missing_(t, j) ? mis : obs).push_back(2 * n_ + j);
    if (mis.empty()) continue;
    const int k = z[t];
    const JpsnParams& s = states_[k];
    VectorXd draw;
    if (obs.empty()) {
      draw = mvn_sample_chol(s.mu, caches_[k].sigma_llt, rng);
    } else {
      VectorXd full = augmented_row(t, k);
      VectorXd xobs(obs.size());
      for (std::size_t a = 0; a < obs.size(); ++a) xobs[a] = full[obs[a]];
      GaussianConditional cond = condition_mvn(s.mu, s.sigma, mis, obs, xobs);
      draw = mvn_sample(cond.mean, cond.cov, rng);
      VectorXd expanded = VectorXd::Zero(p);
      for (std::size_t a = 0; a < mis.size(); ++a) expanded[mis[a]] = draw[a];
      draw = expanded;
    }
    // Write back: planar pairs become (radius, angle), linear coordinates
    // get the skew shift restored.
    for (int i = 0; i < n_; ++i) {
      if (!theta_missing_(t, i)) continue;
      double c0 = obs.empty() ? draw[2 * i] : draw[2 * i];
      double c1 = draw[2 * i + 1];
      double norm = std::hypot(c0, c1);
      while (norm < 1e-12) {
        c0 = rng.normal() * 1e-6;
        c1 = rng.normal() * 1e-6;
        norm = std::hypot(c0, c1);
      }
      w_(t, 2 * i) = c0;
      w_(t, 2 * i + 1) = c1;
      r_(t, i) = norm;
      work_.theta(t, i) = wrap_angle(std::atan2(c1, c0));
    }
    for (int j = 0; j < q_; ++j) {
      if (!y_missing_(t, j)) continue;
      work_.y(t, j) = draw[2 * n_ + j] + s.lambda[j] * d_(t, j);
    }
  }
}

void JpsnEmission::regenerate_data(const std::vector<int>& z, Rng& rng) {
  const int T = work_.T();
  for (int t = 0; t < T; ++t) {
    const int k = z[t];
    const JpsnParams& s = states_[k];
    for (int j = 0; j < q_; ++j) d_(t, j) = std::fabs(rng.normal());
    VectorXd x = mvn_sample_chol(s.mu, caches_[k].sigma_llt, rng);
    for (int i = 0; i < n_; ++i) {
      double c0 = x[2 * i], c1 = x[2 * i + 1];
      double norm = std::hypot(c0, c1);
      while (norm < 1e-12) {
        c0 = rng.normal() * 1e-6;
        c1 = rng.normal() * 1e-6;
        norm = std::hypot(c0, c1);
      }
      w_(t, 2 * i) = c0;
      w_(t, 2 * i + 1) = c1;
      r_(t, i) = norm;
      work_.theta(t, i) = wrap_angle(std::atan2(c1, c0));
    }
    for (int j = 0; j < q_; ++j)
      work_.y(t, j) = x[2 * n_ + j] + s.lambda[j] * d_(t, j);
  }
}

void JpsnEmission::set_radius(int t, int i, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("set_radius: radius must be positive");
  r_(t, i) = v;
  w_(t, 2 * i) = v * std::cos(work_.theta(t, i));
  w_(t, 2 * i + 1) = v * std::sin(work_.theta(t, i));
}

double JpsnEmission::augmented_loglik(const std::vector<int>& z) const {
  double total = 0.0;
  for (int t = 0; t < work_.T(); ++t) {
    total += q_ * std::numbers::ln2 + loglik(t, z[t]);
    for (int j = 0; j < q_; ++j)
      total += -0.5 * (d_(t, j) * d_(t, j) + log_2pi);
    for (int i = 0; i < n_; ++i) total += std::log(r_(t, i));
  }
  return total;
}

// ---------------------------------------------------------------------------
// BaselineEmission
// ---------------------------------------------------------------------------

BaselineEmission::BaselineEmission(const CircLinSeries& data, CircularFamily cf,
                                   LinearFamily lf, BaselinePrior prior,
                                   int states, Rng& rng)
    : n_(data.n()),
      q_(data.q()),
      work_(data),
      theta_missing_(data.theta_missing),
      y_missing_(data.y_missing),
      cf_(cf),
      lf_(lf),
      prior_(prior) {
  for (int t = 0; t < data.T(); ++t) {
    for (int i = 0; i < n_; ++i)
      if (theta_missing_(t, i)) work_.theta(t, i) = rng.uniform(0.0, two_pi);
    for (int j = 0; j < q_; ++j)
      if (y_missing_(t, j)) work_.y(t, j) = 0.0;
  }
  for (int k = 0; k < states; ++k) states_.push_back(prior_draw(rng));
}

BaselineEmissionParams BaselineEmission::prior_draw(Rng& rng) const {
  BaselineEmissionParams p;
  p.circ_family = cf_;
  p.lin_family = lf_;
  for (int i = 0; i < n_; ++i) {
    p.circ_location.push_back(rng.uniform(0.0, two_pi));
    if (cf_ == CircularFamily::von_mises)
      p.circ_concentration.push_back(rng.gamma(prior_.positive_shape) /
                                     prior_.positive_rate);
    else
      p.circ_concentration.push_back(rng.uniform());
  }
  for (int j = 0; j < q_; ++j) {
    p.lin_shape.push_back(rng.gamma(prior_.positive_shape) / prior_.positive_rate);
    p.lin_rate.push_back(rng.gamma(prior_.positive_shape) / prior_.positive_rate);
  }
  return p;
}

void BaselineEmission::reset_params_from_prior(Rng& rng) {
  for (auto& s : states_) s = prior_draw(rng);
}

void BaselineEmission::append_state_from_prior(Rng& rng) {
  states_.push_back(prior_draw(rng));
}

void BaselineEmission::keep_states(const std::vector<int>& keep) {
  std::vector<BaselineEmissionParams> ns;
  ns.reserve(keep.size());
  for (int k : keep) ns.push_back(std::move(states_[k]));
  states_ = std::move(ns);
}

double BaselineEmission::loglik(int t, int k) const {
  const BaselineEmissionParams& s = states_[k];
  double v = 0.0;
  for (int i = 0; i < n_; ++i)
    if (!theta_missing_(t, i))
      v += baseline_circular_logpdf(cf_, work_.theta(t, i), s.circ_location[i],
                                    s.circ_concentration[i]);
  for (int j = 0; j < q_; ++j)
    if (!y_missing_(t, j))
      v += baseline_linear_logpdf(lf_, work_.y(t, j), s.lin_shape[j],
                                  s.lin_rate[j]);
  return v;
}

namespace {

// Generic log-scale Metropolis step for a positive parameter with a
// Gamma(shape, rate) prior.
double mh_positive(double current, double prior_shape, double prior_rate,
                   const std::function<double(double)>& loglik, Rng& rng,
                   int steps = 3, double walk = 0.5) {
  double cur_ll = loglik(current);
  for (int s = 0; s < steps; ++s) {
    const double prop = current * std::exp(walk * rng.normal());
    const double prop_ll = loglik(prop);
    double diff = prop_ll - cur_ll;
    diff += prior_shape * (std::log(prop) - std::log(current)) -
            prior_rate * (prop - current);  // prior with log-walk Jacobian
    if (std::log(rng.uniform()) < diff) {
      current = prop;
      cur_ll = prop_ll;
    }
  }
  return current;
}

double mh_circular_location(double current,
                            const std::function<double(double)>& loglik,
                            Rng& rng, int steps = 3, double walk = 0.4) {
  double cur_ll = loglik(current);
  for (int s = 0; s < steps; ++s) {
    const double prop = wrap_angle(current + walk * rng.normal());
    const double prop_ll = loglik(prop);
    if (std::log(rng.uniform()) < prop_ll - cur_ll) {
      current = prop;
      cur_ll = prop_ll;
    }
  }
  return current;
}

double mh_unit_interval(double current,
                        const std::function<double(double)>& loglik, Rng& rng,
                        int steps = 3, double walk = 0.8) {
  double cur_ll = loglik(current);
  for (int s = 0; s < steps; ++s) {
    const double logit = std::log(current) - std::log1p(-current);
    const double prop_logit = logit + walk * rng.normal();
    const double prop = 1.0 / (1.0 + std::exp(-prop_logit));
    const double prop_ll = loglik(prop);
    double diff = prop_ll - cur_ll;
    diff += std::log(prop) + std::log1p(-prop) - std::log(current) -
            std::log1p(-current);
    if (std::log(rng.uniform()) < diff) {
      current = prop;
      cur_ll = prop_ll;
    }
  }
  return current;
}

}  // namespace

BaselineEmissionParams baseline_conditionals(
    const BaselineEmissionParams& current, const CircLinSeries& data,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& theta_missing,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& y_missing,
    const std::vector<int>& ts, const BaselinePrior& prior, Rng& rng) {
  BaselineEmissionParams out = current;
  const int n = data.n(), q = data.q();
  for (int i = 0; i < n; ++i) {
    std::vector<double> obs;
    for (int t : ts)
      if (!theta_missing(t, i)) obs.push_back(data.theta(t, i));
    if (obs.empty()) {
      out.circ_location[i] = rng.uniform(0.0, two_pi);
      if (current.circ_family == CircularFamily::von_mises)
        out.circ_concentration[i] =
            rng.gamma(prior.positive_shape) / prior.positive_rate;
      else
        out.circ_concentration[i] = rng.uniform();
      continue;
    }
    auto loc_ll = [&](double loc) {
      double v = 0.0;
      for (double th : obs)
        v += baseline_circular_logpdf(current.circ_family, th, loc,
                                      out.circ_concentration[i]);
      return v;
    };
    out.circ_location[i] = mh_circular_location(out.circ_location[i], loc_ll, rng);
    auto conc_ll = [&](double conc) {
      double v = 0.0;
      for (double th : obs)
        v += baseline_circular_logpdf(current.circ_family, th,
                                      out.circ_location[i], conc);
      return v;
    };
    if (current.circ_family == CircularFamily::von_mises) {
      out.circ_concentration[i] =
          mh_positive(out.circ_concentration[i], prior.positive_shape,
                      prior.positive_rate, conc_ll, rng);
    } else {
      out.circ_concentration[i] =
          mh_unit_interval(out.circ_concentration[i], conc_ll, rng);
    }
  }
  for (int j = 0; j < q; ++j) {
    std::vector<double> obs;
    for (int t : ts)
      if (!y_missing(t, j)) obs.push_back(data.y(t, j));
    if (obs.empty()) {
      out.lin_shape[j] = rng.gamma(prior.positive_shape) / prior.positive_rate;
      out.lin_rate[j] = rng.gamma(prior.positive_shape) / prior.positive_rate;
      continue;
    }
    auto shape_ll = [&](double shape) {
      double v = 0.0;
      for (double yv : obs)
        v += baseline_linear_logpdf(current.lin_family, yv, shape,
                                    out.lin_rate[j]);
      return v;
    };
    out.lin_shape[j] = mh_positive(out.lin_shape[j], prior.positive_shape,
                                   prior.positive_rate, shape_ll, rng);
    auto rate_ll = [&](double rate) {
      double v = 0.0;
      for (double yv : obs)
        v += baseline_linear_logpdf(current.lin_family, yv, out.lin_shape[j],
                                    rate);
      return v;
    };
    out.lin_rate[j] = mh_positive(out.lin_rate[j], prior.positive_shape,
                                  prior.positive_rate, rate_ll, rng);
  }
  return out;
}

void BaselineEmission::update_params(
    const std::vector<std::vector<int>>& groups, Rng& rng) {
  for (int k = 0; k < n_states(); ++k)
    states_[k] = baseline_conditionals(states_[k], work_, theta_missing_,
                                       y_missing_, groups[k], prior_, rng);
}

void BaselineEmission::impute_missing(const std::vector<int>& z, Rng& rng) {
  for (int t = 0; t < work_.T(); ++t) {
    const BaselineEmissionParams& s = states_[z[t]];
    for (int i = 0; i < n_; ++i)
      if (theta_missing_(t, i))
        work_.theta(t, i) = baseline_circular_sample(
            cf_, s.circ_location[i], s.circ_concentration[i], rng);
    for (int j = 0; j < q_; ++j)
      if (y_missing_(t, j))
        work_.y(t, j) =
            baseline_linear_sample(lf_, s.lin_shape[j], s.lin_rate[j], rng);
  }
}

void BaselineEmission::regenerate_data(const std::vector<int>& z, Rng& rng) {
  for (int t = 0; t < work_.T(); ++t) {
    const BaselineEmissionParams& s = states_[z[t]];
    for (int i = 0; i < n_; ++i)
      work_.theta(t, i) = baseline_circular_sample(cf_, s.circ_location[i],
                                                   s.circ_concentration[i], rng);
    for (int j = 0; j < q_; ++j)
      work_.y(t, j) =
          baseline_linear_sample(lf_, s.lin_shape[j], s.lin_rate[j], rng);
  }
}

// ---------------------------------------------------------------------------
// GibbsSampler
// ---------------------------------------------------------------------------

GibbsSampler::GibbsSampler(const CircLinSeries& data, const FitConfig& config)
    : data_(data), config_(config), rng_(config.seed) {
  data_.validate();
  config_.validate();
  const int T = data_.T();
  const int p = 2 * data_.n() + data_.q();
  // Start the concentrations at moderate values rather than prior draws: a
  // draw near the diffuse prior's mean (around 100 under the default
  // G(1, 0.01)) makes the first beam sweeps instantiate hundreds of states
  // before the conditionals settle. One sweep replaces these anyway.
  hyper_ = ShdpHyper{1.0, 1.0, 0.5};

  const int L0 = config_.weak_limit ? config_.truncation
                                    : std::min(config_.initial_states, T);
  hmm_.infinite = !config_.weak_limit;
  hmm_.z.resize(T);
  const int blocks = config_.weak_limit
                         ? std::min(config_.initial_states, L0)
                         : L0;
  for (int t = 0; t < T; ++t)
    hmm_.z[t] = std::min(static_cast<int>(
                             static_cast<long>(t) * blocks / T),
                         blocks - 1);
  const int cols = hmm_.infinite ? L0 + 1 : L0;
  hmm_.beta = VectorXd::Constant(cols, 1.0 / cols);
  hmm_.pi.resize(L0, cols);
  hmm_.recompute_counts();
  TableCounts tables =
      sample_tables(hmm_.counts, hmm_.beta, hyper_.gamma, hyper_.rho, rng_);
  hmm_.beta = hmm_.infinite
                  ? sample_beta_infinite(tables, hyper_.tau, rng_)
                  : sample_beta_weak_limit(tables, hyper_.tau, L0, rng_);
  for (int j = 0; j < L0; ++j)
    hmm_.pi.row(j) = sample_pi_row(j, hmm_.beta, hyper_.gamma, hyper_.rho,
                                   hmm_.counts.row(j), hmm_.infinite, rng_);

  switch (config_.family) {
    case EmissionFamilyKind::jpsn: {
      JpsnPrior prior;
      prior.niw.mu0 = VectorXd::Zero(p);
      prior.niw.kappa = config_.niw_kappa;
      prior.niw.dof = config_.niw_dof > 0.0 ? config_.niw_dof : p + 19.0;
      prior.niw.psi = config_.niw_psi_scale * MatrixXd::Identity(p, p);
      prior.lambda_mean = VectorXd::Constant(data_.q(), config_.lambda_prior_mean);
      prior.lambda_cov =
          config_.lambda_prior_var * MatrixXd::Identity(data_.q(), data_.q());
      emission_ = std::make_unique<JpsnEmission>(data_, std::move(prior), L0, rng_);
      break;
    }
    default: {
      CircularFamily cf = (config_.family == EmissionFamilyKind::vmlg ||
                           config_.family == EmissionFamilyKind::vmlw)
                              ? CircularFamily::von_mises
                              : CircularFamily::wrapped_cauchy;
      LinearFamily lf = (config_.family == EmissionFamilyKind::vmlg ||
                         config_.family == EmissionFamilyKind::wclg)
                            ? LinearFamily::log_gamma
                            : LinearFamily::log_weibull;
      BaselinePrior bp{config_.baseline_prior_shape, config_.baseline_prior_rate};
      emission_ =
          std::make_unique<BaselineEmission>(data_, cf, lf, bp, L0, rng_);
      break;
    }
  }
  // Replace the prior-drawn emission parameters with draws from their full
  // conditionals given the initial block assignment. Prior draws sit at the
  // wrong scale (the default NIW concentrates covariance near I/18), and a
  // first beam sweep against them collapses every point into one state that
  // the sampler cannot split later.
  emission_->update_params(group_by_state(), rng_);
}

JpsnEmission* GibbsSampler::jpsn_emission() {
  return dynamic_cast<JpsnEmission*>(emission_.get());
}

std::vector<std::vector<int>> GibbsSampler::group_by_state() const {
  std::vector<std::vector<int>> groups(hmm_.L());
  for (int t = 0; t < hmm_.T(); ++t) groups[hmm_.z[t]].push_back(t);
  return groups;
}

void GibbsSampler::prune() {
  if (!hmm_.infinite) return;
  std::vector<char> occupied(hmm_.L(), 0);
  occupied[0] = 1;  // state 0 anchors z_0 and always keeps its row
  for (int zt : hmm_.z) occupied[zt] = 1;
  std::vector<int> keep;
  for (int k = 0; k < hmm_.L(); ++k)
    if (occupied[k]) keep.push_back(k);
  if (static_cast<int>(keep.size()) == hmm_.L()) return;
  hmm_.compact(keep);
  emission_->keep_states(keep);
}

void GibbsSampler::sweep() {
  // (1) the state sequence: a beam pass for block moves and truncation
  // growth, then a site-wise pass so labels can cross the slice barriers
  auto loglik = [this](int t, int k) { return emission_->loglik(t, k); };
  beam_sample_z(
      hmm_, hyper_, loglik,
      [this]() { emission_->append_state_from_prior(rng_); }, rng_);
  ffbs_refine_z(hmm_, loglik, rng_);
  // Collapsed pass with the rows integrated out; it must precede the pi
  // update, which then regenerates the rows it marginalized.
  direct_assignment_pass(hmm_, hyper_, loglik, rng_);

  // (2) table augmentation, then the hyperparameters while (beta, pi) are
  // marginalized: their conditionals are count-based, and updating them
  // after the weights are regenerated would condition on stale state
  TableCounts tables =
      sample_tables(hmm_.counts, hmm_.beta, hyper_.gamma, hyper_.rho, rng_);
  hyper_ = hmm_.infinite
               ? sample_hyperparameters_infinite(tables, hmm_.counts, hyper_,
                                                 config_.shdp, rng_)
               : sample_hyperparameters_weak_limit(tables, hmm_.counts,
                                                   hmm_.L(), hyper_,
                                                   config_.shdp, rng_);

  // (3) global weights and transition rows under the fresh hyperparameters
  hmm_.beta = hmm_.infinite
                  ? sample_beta_infinite(tables, hyper_.tau, rng_)
                  : sample_beta_weak_limit(tables, hyper_.tau, hmm_.L(), rng_);
  for (int j = 0; j < hmm_.L(); ++j)
    hmm_.pi.row(j) = sample_pi_row(j, hmm_.beta, hyper_.gamma, hyper_.rho,
                                   hmm_.counts.row(j), hmm_.infinite, rng_);

  // (5)-(9) emissions: per-state parameters, latents, imputation
  emission_->update_params(group_by_state(), rng_);
  emission_->update_latents(hmm_.z, rng_);
  emission_->impute_missing(hmm_.z, rng_);

  prune();
  hmm_.check_valid();
  ++sweep_index_;
}

void GibbsSampler::prior_reinitialize() {
  if (hmm_.infinite)
    throw std::logic_error(
        "prior_reinitialize: only supported for the weak-limit backend");
  hyper_ = config_.shdp.sample(rng_);
  hmm_ = weak_limit_prior_draw(hyper_, config_.truncation, data_.T(), rng_);
  emission_->reset_params_from_prior(rng_);
  emission_->regenerate_data(hmm_.z, rng_);
}

void GibbsSampler::regenerate_data() {
  emission_->regenerate_data(hmm_.z, rng_);
}

StoredSweep GibbsSampler::snapshot() const {
  StoredSweep s;
  s.tau = hyper_.tau;
  s.gamma = hyper_.gamma;
  s.rho = hyper_.rho;
  s.K = hmm_.occupied_states();
  s.z = hmm_.z;
  s.pi = hmm_.pi;
  const auto* je = dynamic_cast<const JpsnEmission*>(emission_.get());
  const auto* be = dynamic_cast<const BaselineEmission*>(emission_.get());
  for (int k = 0; k < emission_->n_states(); ++k) {
    StoredState st;
    if (je != nullptr) st.jpsn = identify(je->state_params(k));
    if (be != nullptr) st.baseline = be->state_params(k);
    s.states.push_back(std::move(st));
  }
  const CircLinSeries& work =
      je != nullptr ? je->working_series() : be->working_series();
  for (int t = 0; t < data_.T(); ++t)
    for (int i = 0; i < data_.n(); ++i)
      if (data_.theta_missing(t, i)) s.imputed_theta.push_back(work.theta(t, i));
  for (int t = 0; t < data_.T(); ++t)
    for (int j = 0; j < data_.q(); ++j)
      if (data_.y_missing(t, j)) s.imputed_y.push_back(work.y(t, j));
  return s;
}

PosteriorSamples GibbsSampler::run(
    const std::function<void(int, int)>& progress) {
  PosteriorSamples out;
  out.family = config_.family;
  out.n = data_.n();
  out.q = data_.q();
  out.T = data_.T();
  out.seed = config_.seed;
  for (int t = 0; t < data_.T(); ++t)
    for (int i = 0; i < data_.n(); ++i)
      if (data_.theta_missing(t, i)) out.theta_missing_cells.emplace_back(t, i);
  for (int t = 0; t < data_.T(); ++t)
    for (int j = 0; j < data_.q(); ++j)
      if (data_.y_missing(t, j)) out.y_missing_cells.emplace_back(t, j);

  for (int it = 0; it < config_.iterations; ++it) {
    sweep();
    if (auto* je = jpsn_emission(); je != nullptr && it + 1 == config_.burnin)
      je->set_adaptation(false);
    if (it >= config_.burnin && (it - config_.burnin) % config_.thin == 0)
      out.sweeps.push_back(snapshot());
    if (progress) progress(it + 1, config_.iterations);
  }
  if (auto* je = jpsn_emission(); je != nullptr)
    for (int i = 0; i < data_.n(); ++i)
      out.acceptance_rates.push_back(je->acceptance_rate(i));
  return out;
}

int PosteriorSamples::modal_k() const {
  std::vector<int> counts;
  for (const auto& s : sweeps) {
    if (s.K >= static_cast<int>(counts.size())) counts.resize(s.K + 1, 0);
    counts[s.K] += 1;
  }
  int best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > counts[best]) best = static_cast<int>(k);
  return best;
}

PosteriorSamples fit(const CircLinSeries& data, const FitConfig& config,
                     const std::function<void(int, int)>& progress) {
  GibbsSampler sampler(data, config);
  return sampler.run(progress);
}

}  // namespace jpsn
