#include "jpsn/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "jpsn/angle.hpp"
#include "jpsn/distributions.hpp"
#include "jpsn/special.hpp"

namespace jpsn {

namespace fs = std::filesystem;

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty");
  std::sort(values.begin(), values.end());
  const double pos = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

// ---------------------------------------------------------------------------
// CRPS
// ---------------------------------------------------------------------------

namespace {

// sum over ordered pairs (b, b') of (x_b' - x_b)^+ restricted to sorted
// order: Gini identity sum_{i<j} (x_(j) - x_(i)) = sum_k (2k - B + 1) x_(k).
double sorted_pair_sum(const std::vector<double>& sorted) {
  const std::ptrdiff_t B = static_cast<std::ptrdiff_t>(sorted.size());
  double s = 0.0;
  for (std::ptrdiff_t k = 0; k < B; ++k)
    s += (2.0 * k - B + 1.0) * sorted[k];
  return s;
}

}  // namespace

double crps_linear(double observed, std::vector<double> samples) {
  const std::size_t B = samples.size();
  if (B == 0) throw std::invalid_argument("crps_linear: empty sample list");
  double term1 = 0.0;
  for (double x : samples) term1 += std::fabs(observed - x);
  term1 /= B;
  std::sort(samples.begin(), samples.end());
  const double pair_sum = sorted_pair_sum(samples);
  return term1 - pair_sum / (static_cast<double>(B) * B);
}

double crps_circular(double observed, std::vector<double> samples) {
  const std::size_t B = samples.size();
  if (B == 0) throw std::invalid_argument("crps_circular: empty sample list");
  const Angle obs(observed);
  double term1 = 0.0;
  for (double x : samples) term1 += angular_distance(obs, Angle(x));
  term1 /= B;

  for (double& x : samples) x = wrap_angle(x);
  std::sort(samples.begin(), samples.end());
  // Start from the linear pair sum of the sorted angles, then correct the
  // pairs whose gap exceeds pi: their arc distance is 2 pi - gap, so each
  // contributes 2 pi - 2 gap relative to the linear sum.
  double pair_sum = sorted_pair_sum(samples);
  std::vector<double> suffix(B + 1, 0.0);
  for (std::size_t k = B; k-- > 0;) suffix[k] = suffix[k + 1] + samples[k];
  std::size_t lo = 0;
  for (std::size_t i = 0; i < B; ++i) {
    if (lo < i + 1) lo = i + 1;
    while (lo < B && samples[lo] - samples[i] <= std::numbers::pi) ++lo;
    const double count = static_cast<double>(B - lo);
    if (count == 0.0) continue;
    const double gap_sum = suffix[lo] - count * samples[i];
    pair_sum += count * two_pi - 2.0 * gap_sum;
  }
  return term1 - pair_sum / (static_cast<double>(B) * B);
}

// ---------------------------------------------------------------------------
// Holdout
// ---------------------------------------------------------------------------

HoldoutPlan make_holdout_plan(const CircLinSeries& data, double fraction,
                              std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  Rng rng(seed);
  HoldoutPlan plan;
  plan.fraction = fraction;
  auto pick = [&](const std::vector<int>& ts, int var,
                  std::vector<std::pair<int, int>>& cells) {
    if (ts.empty()) return;
    std::vector<int> order = ts;
    for (std::size_t a = order.size(); a > 1; --a)
      std::swap(order[a - 1], order[rng.uniform_index(a)]);
    const std::size_t take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(fraction * order.size())));
    for (std::size_t a = 0; a < take && a < order.size(); ++a)
      cells.emplace_back(order[a], var);
  };
  for (int i = 0; i < data.n(); ++i) {
    std::vector<int> ts;
    for (int t = 0; t < data.T(); ++t)
      if (!data.theta_missing(t, i)) ts.push_back(t);
    pick(ts, i, plan.circular_cells);
  }
  for (int j = 0; j < data.q(); ++j) {
    std::vector<int> ts;
    for (int t = 0; t < data.T(); ++t)
      if (!data.y_missing(t, j)) ts.push_back(t);
    pick(ts, j, plan.linear_cells);
  }
  std::sort(plan.circular_cells.begin(), plan.circular_cells.end());
  std::sort(plan.linear_cells.begin(), plan.linear_cells.end());
  return plan;
}

CircLinSeries apply_holdout(const CircLinSeries& data, const HoldoutPlan& plan) {
  CircLinSeries masked = data;
  for (auto [t, i] : plan.circular_cells) {
    if (masked.theta_missing(t, i))
      throw std::invalid_argument("apply_holdout: cell already missing");
    masked.theta_missing(t, i) = true;
    masked.theta(t, i) = std::numeric_limits<double>::quiet_NaN();
  }
  for (auto [t, j] : plan.linear_cells) {
    if (masked.y_missing(t, j))
      throw std::invalid_argument("apply_holdout: cell already missing");
    masked.y_missing(t, j) = true;
    masked.y(t, j) = std::numeric_limits<double>::quiet_NaN();
  }
  return masked;
}

CrpsReport score_holdout(const PosteriorSamples& post,
                         const CircLinSeries& original,
                         const HoldoutPlan& plan) {
  std::map<std::pair<int, int>, int> theta_col, y_col;
  for (std::size_t c = 0; c < post.theta_missing_cells.size(); ++c)
    theta_col[post.theta_missing_cells[c]] = static_cast<int>(c);
  for (std::size_t c = 0; c < post.y_missing_cells.size(); ++c)
    y_col[post.y_missing_cells[c]] = static_cast<int>(c);

  CrpsReport report;
  report.per_circular.assign(original.n(), 0.0);
  report.per_linear.assign(original.q(), 0.0);
  std::vector<int> circ_counts(original.n(), 0), lin_counts(original.q(), 0);

  std::vector<double> draws(post.sweeps.size());
  for (auto cell : plan.circular_cells) {
    auto it = theta_col.find(cell);
    if (it == theta_col.end())
      throw std::invalid_argument("score_holdout: cell not present in the store");
    for (std::size_t b = 0; b < post.sweeps.size(); ++b)
      draws[b] = post.sweeps[b].imputed_theta.at(it->second);
    report.per_circular[cell.second] +=
        crps_circular(original.theta(cell.first, cell.second), draws);
    circ_counts[cell.second] += 1;
  }
  for (auto cell : plan.linear_cells) {
    auto it = y_col.find(cell);
    if (it == y_col.end())
      throw std::invalid_argument("score_holdout: cell not present in the store");
    for (std::size_t b = 0; b < post.sweeps.size(); ++b)
      draws[b] = post.sweeps[b].imputed_y.at(it->second);
    report.per_linear[cell.second] +=
        crps_linear(original.y(cell.first, cell.second), draws);
    lin_counts[cell.second] += 1;
  }
  double csum = 0.0, lsum = 0.0;
  int cn = 0, ln = 0;
  for (int i = 0; i < original.n(); ++i)
    if (circ_counts[i] > 0) {
      report.per_circular[i] /= circ_counts[i];
      csum += report.per_circular[i];
      ++cn;
    }
  for (int j = 0; j < original.q(); ++j)
    if (lin_counts[j] > 0) {
      report.per_linear[j] /= lin_counts[j];
      lsum += report.per_linear[j];
      ++ln;
    }
  report.circular_mean = cn > 0 ? csum / cn : 0.0;
  report.linear_mean = ln > 0 ? lsum / ln : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

std::vector<int> align_states(const StoredSweep& sweep, int k_hat) {
  std::vector<int> order;
  std::vector<char> seen(sweep.states.size(), 0);
  for (int zt : sweep.z) {
    if (!seen[zt]) {
      seen[zt] = 1;
      order.push_back(zt);
    }
  }
  if (static_cast<int>(order.size()) != k_hat) return {};
  return order;
}

namespace {

IntervalSummary interval_of(std::vector<double> values, double ci) {
  IntervalSummary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  s.lo = empirical_quantile(values, (1.0 - ci) / 2.0);
  s.hi = empirical_quantile(values, 1.0 - (1.0 - ci) / 2.0);
  return s;
}

}  // namespace

Summary summarize(const PosteriorSamples& post, double ci_level) {
  if (post.sweeps.empty()) throw std::invalid_argument("summarize: empty store");
  Summary out;

  std::map<int, int> k_counts;
  for (const auto& s : post.sweeps) k_counts[s.K] += 1;
  out.k_hat = 0;
  int best = -1;
  for (auto [k, c] : k_counts) {
    out.k_posterior.emplace_back(
        k, static_cast<double>(c) / post.sweeps.size());
    if (c > best) {
      best = c;
      out.k_hat = k;
    }
  }

  std::vector<double> taus, gammas, rhos;
  for (const auto& s : post.sweeps) {
    taus.push_back(s.tau);
    gammas.push_back(s.gamma);
    rhos.push_back(s.rho);
  }
  out.tau = interval_of(taus, ci_level);
  out.gamma = interval_of(gammas, ci_level);
  out.rho = interval_of(rhos, ci_level);

  // Aligned per-state quantities from the modal-K samples.
  const int K = out.k_hat;
  const bool is_jpsn = post.family == EmissionFamilyKind::jpsn;
  const int p = 2 * post.n + post.q;

  std::vector<std::vector<std::vector<double>>> trans(
      K, std::vector<std::vector<double>>(K + 1));
  int n_params = 0;
  if (is_jpsn) {
    n_params = p;
    for (int c = 0; c < 2 * post.n; ++c)
      out.emission_component_names.push_back(
          "mu_w" + std::to_string(c / 2 + 1) + (c % 2 ? "_sin" : "_cos"));
    for (int j = 0; j < post.q; ++j)
      out.emission_component_names.push_back("mu_y" + std::to_string(j + 1));
  } else {
    n_params = 2 * post.n + 2 * post.q;
    for (int i = 0; i < post.n; ++i) {
      out.emission_component_names.push_back("location_" + std::to_string(i + 1));
      out.emission_component_names.push_back("concentration_" + std::to_string(i + 1));
    }
    for (int j = 0; j < post.q; ++j) {
      out.emission_component_names.push_back("shape_" + std::to_string(j + 1));
      out.emission_component_names.push_back("rate_" + std::to_string(j + 1));
    }
  }
  std::vector<std::vector<std::vector<double>>> emission(
      K, std::vector<std::vector<double>>(n_params));
  std::vector<std::vector<std::vector<double>>> omega(
      K, std::vector<std::vector<double>>(is_jpsn ? p * p : 0));

  int aligned = 0;
  for (const auto& s : post.sweeps) {
    if (s.K != K) continue;
    auto order = align_states(s, K);
    if (order.empty()) continue;
    ++aligned;
    std::vector<int> aligned_of(s.states.size(), -1);
    for (int a = 0; a < K; ++a) aligned_of[order[a]] = a;
    for (int a = 0; a < K; ++a) {
      const int k = order[a];
      // transition row: aligned targets plus everything else pooled
      double rest = 0.0;
      std::vector<double> to_aligned(K, 0.0);
      for (Eigen::Index c = 0; c < s.pi.cols(); ++c) {
        const int target = c < static_cast<Eigen::Index>(aligned_of.size())
                               ? aligned_of[c]
                               : -1;
        if (target >= 0)
          to_aligned[target] += s.pi(k, c);
        else
          rest += s.pi(k, c);
      }
      for (int b = 0; b < K; ++b) trans[a][b].push_back(to_aligned[b]);
      trans[a][K].push_back(rest);

      if (is_jpsn) {
        const auto& ip = s.states[k].jpsn;
        for (int c = 0; c < p; ++c) emission[a][c].push_back(ip.mu_tilde[c]);
        MatrixXd om = correlation_matrix(ip);
        for (int r = 0; r < p; ++r)
          for (int c = 0; c < p; ++c) omega[a][r * p + c].push_back(om(r, c));
      } else {
        const auto& bp = s.states[k].baseline;
        int c = 0;
        for (int i = 0; i < post.n; ++i) {
          emission[a][c++].push_back(bp.circ_location[i]);
          emission[a][c++].push_back(bp.circ_concentration[i]);
        }
        for (int j = 0; j < post.q; ++j) {
          emission[a][c++].push_back(bp.lin_shape[j]);
          emission[a][c++].push_back(bp.lin_rate[j]);
        }
      }
    }
  }
  out.aligned_samples = aligned;
  if (aligned == 0) return out;

  out.transition.resize(K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b <= K; ++b)
      out.transition[a].push_back(interval_of(trans[a][b], ci_level));
  out.emission.resize(K);
  for (int a = 0; a < K; ++a)
    for (int c = 0; c < n_params; ++c)
      out.emission[a].push_back(interval_of(emission[a][c], ci_level));
  if (is_jpsn) {
    for (int a = 0; a < K; ++a) {
      MatrixXd mean(p, p);
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> sig(p, p);
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) {
          auto s = interval_of(omega[a][r * p + c], ci_level);
          mean(r, c) = s.mean;
          sig(r, c) = r != c && (s.lo > 0.0 || s.hi < 0.0);
        }
      out.omega_mean.push_back(mean);
      out.omega_significant.push_back(sig);
    }
  }
  return out;
}

VectorXd marginal_density_grid(const PosteriorSamples& post, bool circular,
                               int var_index, int aligned_state,
                               const VectorXd& grid) {
  const int K = post.modal_k();
  VectorXd density = VectorXd::Zero(grid.size());
  int used = 0;
  const bool is_jpsn = post.family == EmissionFamilyKind::jpsn;
  for (const auto& s : post.sweeps) {
    if (s.K != K) continue;
    auto order = align_states(s, K);
    if (order.empty()) continue;
    const int k = order.at(aligned_state);
    ++used;
    if (is_jpsn) {
      const auto& ip = s.states[k].jpsn;
      if (circular) {
        const int i = var_index;
        Eigen::Vector2d mu_w(ip.mu_tilde[2 * i], ip.mu_tilde[2 * i + 1]);
        Eigen::Matrix2d sig = ip.sigma_tilde.block<2, 2>(2 * i, 2 * i);
        for (Eigen::Index g = 0; g < grid.size(); ++g)
          density[g] += std::exp(
              projected_normal_logpdf(Angle(grid[g]), mu_w, sig));
      } else {
        const int j = var_index;
        const double mu = ip.mu_tilde[2 * post.n + j];
        const double s2 = ip.sigma_tilde(2 * post.n + j, 2 * post.n + j);
        const double lam = ip.lambda[j];
        const double ups = s2 + lam * lam;
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
          const double diff = grid[g] - mu;
          double v = std::exp(-0.5 * diff * diff / ups) /
                     std::sqrt(2.0 * std::numbers::pi * ups);
          if (lam != 0.0)
            v *= 2.0 * norm_cdf(lam * diff / (std::sqrt(s2) * std::sqrt(ups)));
          density[g] += v;
        }
      }
    } else {
      const auto& bp = s.states[k].baseline;
      for (Eigen::Index g = 0; g < grid.size(); ++g) {
        density[g] += std::exp(
            circular ? baseline_circular_logpdf(
                           bp.circ_family, grid[g],
                           bp.circ_location[var_index],
                           bp.circ_concentration[var_index])
                     : baseline_linear_logpdf(bp.lin_family, grid[g],
                                              bp.lin_shape[var_index],
                                              bp.lin_rate[var_index]));
      }
    }
  }
  if (used == 0)
    throw std::invalid_argument("marginal_density_grid: no aligned samples");
  return density / used;
}

void write_summary(const Summary& s, const PosteriorSamples& post,
                   const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  {
    std::ofstream out(base / "k_posterior.tsv");
    out << "K\tprobability\n";
    out.precision(17);
    for (auto [k, prob] : s.k_posterior) out << k << "\t" << prob << "\n";
  }
  {
    std::ofstream out(base / "hyperparameters.tsv");
    out << "parameter\tmean\tlo\thi\n";
    out.precision(17);
    out << "tau\t" << s.tau.mean << "\t" << s.tau.lo << "\t" << s.tau.hi << "\n";
    out << "gamma\t" << s.gamma.mean << "\t" << s.gamma.lo << "\t" << s.gamma.hi
        << "\n";
    out << "rho\t" << s.rho.mean << "\t" << s.rho.lo << "\t" << s.rho.hi << "\n";
  }
  {
    std::ofstream out(base / "transition_matrix.tsv");
    out << "from\tto\tmean\tlo\thi\n";
    out.precision(17);
    for (std::size_t a = 0; a < s.transition.size(); ++a)
      for (std::size_t b = 0; b < s.transition[a].size(); ++b) {
        const auto& iv = s.transition[a][b];
        out << a + 1 << "\t"
            << (b < s.transition[a].size() - 1 ? std::to_string(b + 1)
                                               : std::string("rest"))
            << "\t" << iv.mean << "\t" << iv.lo << "\t" << iv.hi << "\n";
      }
  }
  {
    std::ofstream out(base / "emission_summary.tsv");
    out << "state\tcomponent\tmean\tlo\thi\n";
    out.precision(17);
    for (std::size_t a = 0; a < s.emission.size(); ++a)
      for (std::size_t c = 0; c < s.emission[a].size(); ++c) {
        const auto& iv = s.emission[a][c];
        out << a + 1 << "\t" << s.emission_component_names[c] << "\t" << iv.mean
            << "\t" << iv.lo << "\t" << iv.hi << "\n";
      }
  }
  for (std::size_t a = 0; a < s.omega_mean.size(); ++a) {
    std::ofstream out(base / ("omega_state" + std::to_string(a + 1) + ".tsv"));
    out << "row\tcol\tmean\tsignificant\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < s.omega_mean[a].rows(); ++r)
      for (Eigen::Index c = 0; c < s.omega_mean[a].cols(); ++c)
        out << r + 1 << "\t" << c + 1 << "\t" << s.omega_mean[a](r, c) << "\t"
            << (s.omega_significant[a](r, c) ? 1 : 0) << "\n";
  }
  {
    std::ofstream out(base / "summary.txt");
    out << "Posterior summary (" << family_name(post.family) << " emissions, "
        << post.sweeps.size() << " stored samples)\n\n";
    out << "K posterior:\n";
    for (auto [k, prob] : s.k_posterior)
      out << "  K = " << k << ": " << prob << "\n";
    out << "Modal K: " << s.k_hat << " (" << s.aligned_samples
        << " aligned samples)\n\n";
    out << "Hyperparameters (mean [95% CI]):\n";
    auto line = [&](const char* name, const IntervalSummary& iv) {
      out << "  " << name << ": " << iv.mean << " [" << iv.lo << ", " << iv.hi
          << "]\n";
    };
    line("tau", s.tau);
    line("gamma", s.gamma);
    line("rho", s.rho);
    out << "\nTransition matrix posterior means (rows: from, last column: "
           "unrepresented states):\n";
    for (const auto& row : s.transition) {
      out << " ";
      for (const auto& iv : row) out << " " << iv.mean;
      out << "\n";
    }
    out << "\nEmission summaries are in emission_summary.tsv; correlation\n"
           "matrices with significance flags in omega_state*.tsv.\n";
  }
}

}  // namespace jpsn
