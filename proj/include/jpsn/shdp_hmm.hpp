#ifndef JPSN_SHDP_HMM_HPP
#define JPSN_SHDP_HMM_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "jpsn/rng.hpp"

namespace jpsn {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;
using Eigen::VectorXi;

/// Concentration and stickiness parameters of the sticky HDP.
struct ShdpHyper {
  double tau = 1.0;    // top-level concentration
  double gamma = 1.0;  // per-row concentration
  double rho = 0.5;    // self-transition weight in [0, 1]
};

/// Gamma(shape, rate) priors on tau and gamma, Beta(a, b) on rho.
struct ShdpPriors {
  double tau_shape = 1.0;
  double tau_rate = 0.01;
  double gamma_shape = 1.0;
  double gamma_rate = 0.01;
  double rho_a = 1.0;
  double rho_b = 1.0;

  void validate() const;
  ShdpHyper sample(Rng& rng) const;
};

/// The latent transition structure. Two representations share this type:
///  - infinite (beam/dynamic truncation): beta has L+1 entries, the last
///    being the aggregated mass of unrepresented states, and each of the L
///    pi rows has L+1 entries with the same convention;
///  - weak-limit of degree L: beta and the rows have exactly L entries.
/// States are 0-based internally; the fixed initial state z_0 is state 0.
struct HmmLatent {
  std::vector<int> z;  // z_1..z_T as 0-based labels
  VectorXd beta;
  MatrixXd pi;
  bool infinite = true;
  MatrixXi counts;  // L x L transition counts implied by z (and z_0 = 0)

  int L() const { return static_cast<int>(pi.rows()); }
  int T() const { return static_cast<int>(z.size()); }

  void recompute_counts();
  void check_valid() const;  // row/beta sums, count consistency

  /// Number of states with at least one assignment in z.
  int occupied_states() const;

  /// Drop the states not listed in `keep` (ascending, must include every
  /// occupied state and state 0); their beta/pi mass folds into the
  /// remainder. Only valid for the infinite representation. z is relabeled.
  void compact(const std::vector<int>& keep);
};

MatrixXi transition_counts(const std::vector<int>& z, int L);

/// CRP table counts per (row, state) cell plus the sticky override counts,
/// drawn by the Bernoulli-chain construction.
struct TableCounts {
  MatrixXi m;           // tables
  VectorXi overrides;   // per row j, override tables among m(j, j)
  int total() const { return m.sum(); }
  int override_total() const { return overrides.sum(); }
  /// Column sums with overrides removed (the top-level dish counts).
  VectorXi mbar_columns() const;
};

TableCounts sample_tables(const MatrixXi& counts, const VectorXd& beta,
                          double gamma, double rho, Rng& rng);

/// Global weights given table counts. Infinite: Dirichlet(mbar_1, ...,
/// mbar_L, tau) including the remainder entry. Weak-limit: Dirichlet(tau/L +
/// mbar_k).
VectorXd sample_beta_infinite(const TableCounts& tables, double tau, Rng& rng);
VectorXd sample_beta_weak_limit(const TableCounts& tables, double tau, int L,
                                Rng& rng);

/// One transition row from its Dirichlet full conditional. `beta` carries
/// the remainder entry iff `infinite`.
VectorXd sample_pi_row(int j, const VectorXd& beta, double gamma, double rho,
                       const VectorXi& counts_row, bool infinite, Rng& rng);

/// Conjugate hyperparameter updates from the table statistics, with (beta,
/// pi) marginalized: gamma via the Beta/Bernoulli auxiliary scheme, rho via
/// Beta conjugacy with the override counts, tau via the Escobar-West
/// mixture. Exact for the infinite representation; the updates must run
/// between the table draw and the (beta, pi) regeneration.
ShdpHyper sample_hyperparameters_infinite(const TableCounts& tables,
                                          const MatrixXi& counts,
                                          ShdpHyper current,
                                          const ShdpPriors& priors, Rng& rng);

/// Same scheme for the degree-L weak limit. gamma and rho share the
/// conjugate updates; tau instead gets Metropolis steps on its exact
/// count-based conditional, whose dish factor is the Dirichlet(tau/L) urn
/// rather than the infinite-limit form.
ShdpHyper sample_hyperparameters_weak_limit(const TableCounts& tables,
                                            const MatrixXi& counts, int L,
                                            ShdpHyper current,
                                            const ShdpPriors& priors, Rng& rng,
                                            int mh_steps = 4);

/// Instantiate one new state from the remainder: stick-break beta, carve
/// every row's remainder, append a prior row. Infinite representation only.
void expand_one_state(HmmLatent& latent, const ShdpHyper& hyp, Rng& rng);

using EmissionLogLik = std::function<double(int t, int k)>;

/// Beam (slice) resampling of the state sequence. Draws the slice variables,
/// extends the truncation until no hidden state can clear a slice (calling
/// `on_expand` after each instantiation so the caller can append emission
/// parameters), then runs the indicator forward filter and backward-samples
/// z in place. Returns the number of states added.
int beam_sample_z(HmmLatent& latent, const ShdpHyper& hyp,
                  const EmissionLogLik& loglik,
                  const std::function<void()>& on_expand, Rng& rng);

/// Forward-filter backward-sample z over the represented states. Sampling
/// exactly from the posterior restricted to represented-state paths is an
/// always-accept Metropolis move for the infinite model (and the exact
/// Gibbs draw in the weak limit); it supplies the segment-level
/// reassignments that the beam pass freezes behind its slices. New states
/// still enter only through the beam pass.
void ffbs_refine_z(HmmLatent& latent, const EmissionLogLik& loglik, Rng& rng);

/// One collapsed direct-assignment pass over z: each z_t is redrawn from
/// its conditional given (beta, hypers, emissions, z_-t) with the
/// transition rows integrated out, restricted to the represented states.
/// Transition counts update inside the pass, which is what lets redundant
/// states starve and merge; the blocked passes cannot cross that barrier.
/// Valid as partially collapsed Gibbs provided pi is resampled afterwards
/// and not consulted in between.
void direct_assignment_pass(HmmLatent& latent, const ShdpHyper& hyp,
                            const EmissionLogLik& loglik, Rng& rng);

/// Draw (beta, pi, z) from the degree-L weak-limit prior given hypers.
HmmLatent weak_limit_prior_draw(const ShdpHyper& hyp, int L, int T, Rng& rng);

/// Simulate the prior-implied distribution of K, the number of distinct
/// states visited by a length-T chain, under the degree-L weak limit with
/// hyperparameters drawn from their priors. Rows are realized lazily through
/// their Polya urns, so L can be large.
std::vector<int> prior_k_simulate(const ShdpPriors& priors, int T, int L,
                                  int draws, Rng& rng);

}  // namespace jpsn

#endif  // JPSN_SHDP_HMM_HPP
