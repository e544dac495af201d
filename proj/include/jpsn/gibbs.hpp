#ifndef JPSN_GIBBS_HPP
#define JPSN_GIBBS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jpsn/distributions.hpp"
#include "jpsn/identification.hpp"
#include "jpsn/series.hpp"
#include "jpsn/shdp_hmm.hpp"

namespace jpsn {

enum class EmissionFamilyKind { jpsn, vmlg, vmlw, wclg, wclw };

EmissionFamilyKind parse_family(const std::string& name);
std::string family_name(EmissionFamilyKind f);

/// Everything a fit run needs. Prior scalars are dimension-generic; the
/// engine builds the NIW hyper for dim 2n+q at construction (a dof of zero
/// means "dim + 19").
struct FitConfig {
  int iterations = 4000;
  int burnin = 2000;
  int thin = 2;
  EmissionFamilyKind family = EmissionFamilyKind::jpsn;
  std::uint64_t seed = 1;
  int initial_states = 10;
  bool weak_limit = false;  // finite degree-L backend instead of beam
  int truncation = 20;      // L for the weak-limit backend
  ShdpPriors shdp;
  double niw_kappa = 0.001;
  double niw_dof = 0.0;
  double niw_psi_scale = 1.0;
  double lambda_prior_mean = 0.0;
  double lambda_prior_var = 50.0;
  double baseline_prior_shape = 1.0;  // G(shape, rate) on positive baseline
  double baseline_prior_rate = 0.5;   // parameters

  void validate() const;
};

// ---------------------------------------------------------------------------
// Conditional pieces of the JPSN full conditionals
// ---------------------------------------------------------------------------

/// Per-state cache of factorizations derived from (mu, sigma, lambda):
/// everything the within-sweep updates share across time points.
struct ConditionalCache {
  Eigen::LLT<MatrixXd> sigma_llt;
  MatrixXd sigma_inv;
  MatrixXd w_to_y;          // Sigma_wy' Sigma_w^-1
  MatrixXd sigma_ygw;       // Sigma_y - Sigma_wy' Sigma_w^-1 Sigma_wy
  MatrixXd sigma_ygw_inv;
  MatrixXd v_d;             // (Lambda' Sigma_ygw^-1 Lambda + I)^-1
  MatrixXd lam_t_sygw_inv;  // Lambda' Sigma_ygw^-1
};

ConditionalCache make_conditional_cache(const JpsnParams& params);

/// NIW draw given assembled rows (w_t, y_t - diag(lambda) d_t); zero rows
/// means a prior draw.
std::pair<VectorXd, MatrixXd> update_mu_sigma(const NiwHyper& prior,
                                              const MatrixXd& rows, Rng& rng);

/// Normal full conditional of lambda. resid_rows holds y_t - mu_{y_t|w_t},
/// d_rows the matching skew latents (both T_k x q).
VectorXd update_lambda(const VectorXd& prior_mean, const MatrixXd& prior_cov,
                       const MatrixXd& sigma_ygw_inv, const MatrixXd& d_rows,
                       const MatrixXd& resid_rows, Rng& rng);

/// Truncated-normal full conditional of d_t given the state's cache.
VectorXd update_d(const ConditionalCache& cache, const VectorXd& lambda,
                  const VectorXd& y_t, const VectorXd& mu_ygw_t,
                  const VectorXd& current, Rng& rng);

// ---------------------------------------------------------------------------
// Emission components
// ---------------------------------------------------------------------------

/// Per-state emission machinery behind the sweep: likelihood evaluations for
/// the beam pass, parameter updates, latent updates, imputation.
class Emission {
 public:
  virtual ~Emission() = default;
  virtual int n_states() const = 0;
  virtual double loglik(int t, int k) const = 0;
  virtual void append_state_from_prior(Rng& rng) = 0;
  virtual void keep_states(const std::vector<int>& keep) = 0;
  virtual void update_params(const std::vector<std::vector<int>>& groups,
                             Rng& rng) = 0;
  virtual void update_latents(const std::vector<int>& z, Rng& rng) = 0;
  virtual void impute_missing(const std::vector<int>& z, Rng& rng) = 0;
  /// Redraw the full augmented data block given (z, psi); Geweke harness.
  virtual void regenerate_data(const std::vector<int>& z, Rng& rng) = 0;
  virtual void reset_params_from_prior(Rng& rng) = 0;
};

struct JpsnPrior {
  NiwHyper niw;
  VectorXd lambda_mean;
  MatrixXd lambda_cov;
};

class JpsnEmission : public Emission {
 public:
  JpsnEmission(const CircLinSeries& data, JpsnPrior prior, int states,
               Rng& rng);

  int n_states() const override { return static_cast<int>(states_.size()); }
  double loglik(int t, int k) const override;
  void append_state_from_prior(Rng& rng) override;
  void keep_states(const std::vector<int>& keep) override;
  void update_params(const std::vector<std::vector<int>>& groups,
                     Rng& rng) override;
  void update_latents(const std::vector<int>& z, Rng& rng) override;
  void impute_missing(const std::vector<int>& z, Rng& rng) override;
  void regenerate_data(const std::vector<int>& z, Rng& rng) override;
  void reset_params_from_prior(Rng& rng) override;

  const JpsnParams& state_params(int k) const { return states_[k]; }
  void set_state_params(int k, const JpsnParams& p);
  const CircLinSeries& working_series() const { return work_; }
  const MatrixXd& radii() const { return r_; }
  const MatrixXd& skew_latents() const { return d_; }
  void set_radius(int t, int i, double v);

  /// Post-adaptation Metropolis acceptance rate for circular variable i.
  double acceptance_rate(int i) const;
  /// Turning adaptation off freezes the proposal scales and resets the
  /// acceptance counters, so reported rates cover the frozen phase only.
  void set_adaptation(bool on) {
    adapt_ = on;
    if (!on) {
      accept_.assign(accept_.size(), 0);
      propose_.assign(propose_.size(), 0);
    }
  }
  void set_proposal_scale(double s);
  double augmented_loglik(const std::vector<int>& z) const;

 private:
  void refresh_cache(int k);
  VectorXd augmented_row(int t, int k) const;  // (w_t, y_t - lambda_k d_t)
  void update_r(const std::vector<int>& z, Rng& rng);
  void update_d_all(const std::vector<int>& z, Rng& rng);

  int n_ = 0, q_ = 0;
  CircLinSeries work_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> theta_missing_, y_missing_;
  MatrixXd w_;  // T x 2n, always r * (cos, sin) theta
  MatrixXd r_;  // T x n
  MatrixXd d_;  // T x q
  JpsnPrior prior_;
  std::vector<JpsnParams> states_;
  std::vector<ConditionalCache> caches_;
  std::vector<double> prop_scale_;  // per circular variable
  std::vector<long> accept_, propose_;
  bool adapt_ = true;
  bool constructing_ = false;
  long sweep_no_ = 0;

  friend class GibbsSampler;
};

struct BaselinePrior {
  double positive_shape = 1.0;  // G(shape, rate) on concentrations,
  double positive_rate = 0.5;   // shapes and rates
};

class BaselineEmission : public Emission {
 public:
  BaselineEmission(const CircLinSeries& data, CircularFamily cf,
                   LinearFamily lf, BaselinePrior prior, int states, Rng& rng);

  int n_states() const override { return static_cast<int>(states_.size()); }
  double loglik(int t, int k) const override;
  void append_state_from_prior(Rng& rng) override;
  void keep_states(const std::vector<int>& keep) override;
  void update_params(const std::vector<std::vector<int>>& groups,
                     Rng& rng) override;
  void update_latents(const std::vector<int>&, Rng&) override {}
  void impute_missing(const std::vector<int>& z, Rng& rng) override;
  void regenerate_data(const std::vector<int>& z, Rng& rng) override;
  void reset_params_from_prior(Rng& rng) override;

  const BaselineEmissionParams& state_params(int k) const { return states_[k]; }
  void set_state_params(int k, const BaselineEmissionParams& p) { states_[k] = p; }
  const CircLinSeries& working_series() const { return work_; }

 private:
  BaselineEmissionParams prior_draw(Rng& rng) const;

  int n_ = 0, q_ = 0;
  CircLinSeries work_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> theta_missing_, y_missing_;
  CircularFamily cf_;
  LinearFamily lf_;
  BaselinePrior prior_;
  std::vector<BaselineEmissionParams> states_;

  friend class GibbsSampler;
};

/// Metropolis-within-Gibbs refresh of one baseline state's parameters from
/// the values in `current`, given its assigned observations.
BaselineEmissionParams baseline_conditionals(
    const BaselineEmissionParams& current, const CircLinSeries& data,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& theta_missing,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& y_missing,
    const std::vector<int>& ts, const BaselinePrior& prior, Rng& rng);

// ---------------------------------------------------------------------------
// Posterior sample storage (in memory; store.hpp handles files)
// ---------------------------------------------------------------------------

struct StoredState {
  // jpsn family
  IdentifiedJpsnParams jpsn;
  // baseline families
  BaselineEmissionParams baseline;
};

struct StoredSweep {
  double tau = 0.0, gamma = 0.0, rho = 0.0;
  int K = 0;
  std::vector<int> z;
  std::vector<StoredState> states;
  MatrixXd pi;  // L x (L+1) for the beam backend, L x L for weak-limit
  std::vector<double> imputed_theta;  // canonical missing-cell order
  std::vector<double> imputed_y;
};

struct PosteriorSamples {
  EmissionFamilyKind family = EmissionFamilyKind::jpsn;
  int n = 0, q = 0, T = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> theta_missing_cells;  // (t, i)
  std::vector<std::pair<int, int>> y_missing_cells;      // (t, j)
  std::vector<double> acceptance_rates;                  // per circular var
  std::vector<StoredSweep> sweeps;

  int modal_k() const;
};

// ---------------------------------------------------------------------------
// The sampler
// ---------------------------------------------------------------------------

class GibbsSampler {
 public:
  GibbsSampler(const CircLinSeries& data, const FitConfig& config);

  /// One full scan: z, tables/beta, pi, hyperparameters, per-state params,
  /// latents, imputation, pruning.
  void sweep();

  /// Full run honoring burnin/thin; progress goes to the callback when set.
  PosteriorSamples run(const std::function<void(int, int)>& progress = {});

  // Geweke support: draw the whole state (hypers, hmm, params, data) from
  // the prior joint, or refresh the data block given current latents.
  void prior_reinitialize();
  void regenerate_data();

  const HmmLatent& hmm() const { return hmm_; }
  const ShdpHyper& hyper() const { return hyper_; }
  Emission& emission() { return *emission_; }
  JpsnEmission* jpsn_emission();
  StoredSweep snapshot() const;
  Rng& rng() { return rng_; }

 private:
  std::vector<std::vector<int>> group_by_state() const;
  void prune();

  CircLinSeries data_;
  FitConfig config_;
  Rng rng_;
  ShdpHyper hyper_;
  HmmLatent hmm_;
  std::unique_ptr<Emission> emission_;
  long sweep_index_ = 0;
};

/// Convenience wrapper: build the sampler and run it.
PosteriorSamples fit(const CircLinSeries& data, const FitConfig& config,
                     const std::function<void(int, int)>& progress = {});

}  // namespace jpsn

#endif  // JPSN_GIBBS_HPP
