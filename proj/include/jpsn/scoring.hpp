#ifndef JPSN_SCORING_HPP
#define JPSN_SCORING_HPP

#include <string>
#include <utility>
#include <vector>

#include "jpsn/gibbs.hpp"
#include "jpsn/series.hpp"

namespace jpsn {

// ---------------------------------------------------------------------------
// CRPS
// ---------------------------------------------------------------------------

/// Monte Carlo CRPS of a circular predictive sample against an observation,
/// with the angular (shorter-arc) distance. The pairwise double sum is
/// computed exactly in O(B log B) via sorted prefix sums.
double crps_circular(double observed, std::vector<double> samples);

/// Same for a linear variable with absolute difference.
double crps_linear(double observed, std::vector<double> samples);

// ---------------------------------------------------------------------------
// Holdout plans
// ---------------------------------------------------------------------------

/// Cells held out for scoring, per variable; always disjoint from cells that
/// are genuinely missing in the data.
struct HoldoutPlan {
  std::vector<std::pair<int, int>> circular_cells;  // (t, i)
  std::vector<std::pair<int, int>> linear_cells;    // (t, j)
  double fraction = 0.0;
};

HoldoutPlan make_holdout_plan(const CircLinSeries& data, double fraction,
                              std::uint64_t seed);

/// Mask the held-out cells (they become missing for the fit).
CircLinSeries apply_holdout(const CircLinSeries& data, const HoldoutPlan& plan);

struct CrpsReport {
  std::vector<double> per_circular;  // CRPSc_i
  std::vector<double> per_linear;    // CRPSl_j
  double circular_mean = 0.0;
  double linear_mean = 0.0;
};

/// Score held-out cells against their stored per-sweep imputations.
CrpsReport score_holdout(const PosteriorSamples& post,
                         const CircLinSeries& original,
                         const HoldoutPlan& plan);

// ---------------------------------------------------------------------------
// Posterior summaries
// ---------------------------------------------------------------------------

struct IntervalSummary {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct Summary {
  int k_hat = 0;
  std::vector<std::pair<int, double>> k_posterior;  // (K, probability)
  IntervalSummary tau, gamma, rho;
  // k_hat x (k_hat + 1): transitions between aligned states plus the mass
  // of unrepresented states in the last column.
  std::vector<std::vector<IntervalSummary>> transition;
  // Per aligned state: posterior means of the correlation matrix with
  // significance flags (95% CI excluding zero), jpsn family only.
  std::vector<MatrixXd> omega_mean;
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> omega_significant;
  // Per aligned state x component: identified emission means (jpsn) or the
  // flattened baseline parameters.
  std::vector<std::string> emission_component_names;
  std::vector<std::vector<IntervalSummary>> emission;
  int aligned_samples = 0;  // stored sweeps with K == k_hat
};

Summary summarize(const PosteriorSamples& post, double ci_level = 0.95);

/// For a stored sweep with K == k_hat, the stored-state index of each
/// aligned state, in order of first occurrence in z. Empty when K differs.
std::vector<int> align_states(const StoredSweep& sweep, int k_hat);

/// Human-readable report plus machine-readable TSV key-value files.
void write_summary(const Summary& summary, const PosteriorSamples& post,
                   const std::string& dir);

/// Posterior-averaged marginal density of one variable under one aligned
/// state, evaluated on a grid (circular: projected-normal quadrature;
/// linear: univariate skew-normal closed form; baselines: their closed
/// forms).
VectorXd marginal_density_grid(const PosteriorSamples& post, bool circular,
                               int var_index, int aligned_state,
                               const VectorXd& grid);

/// Empirical quantile (linear interpolation) of an unsorted copy.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace jpsn

#endif  // JPSN_SCORING_HPP
