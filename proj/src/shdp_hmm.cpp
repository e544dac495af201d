#include "jpsn/shdp_hmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace jpsn {

void ShdpPriors::validate() const {
  if (!(tau_shape > 0.0 && tau_rate > 0.0 && gamma_shape > 0.0 &&
        gamma_rate > 0.0 && rho_a > 0.0 && rho_b > 0.0))
    throw std::invalid_argument("ShdpPriors: all hyper-prior parameters must be positive");
}

ShdpHyper ShdpPriors::sample(Rng& rng) const {
  ShdpHyper h;
  h.tau = rng.gamma(tau_shape) / tau_rate;
  h.gamma = rng.gamma(gamma_shape) / gamma_rate;
  h.rho = rng.beta(rho_a, rho_b);
  return h;
}

MatrixXi transition_counts(const std::vector<int>& z, int L) {
  MatrixXi counts = MatrixXi::Zero(L, L);
  int prev = 0;  // z_0 is pinned to the first state
  for (int zt : z) {
    counts(prev, zt) += 1;
    prev = zt;
  }
  return counts;
}

void HmmLatent::recompute_counts() { counts = transition_counts(z, L()); }

int HmmLatent::occupied_states() const {
  std::vector<char> seen(L(), 0);
  for (int zt : z) seen[zt] = 1;
  return static_cast<int>(std::count(seen.begin(), seen.end(), 1));
}

void HmmLatent::check_valid() const {
  const int cols = infinite ? L() + 1 : L();
  if (beta.size() != cols || pi.cols() != cols)
    throw std::runtime_error("HmmLatent: shape mismatch");
  if (std::fabs(beta.sum() - 1.0) > 1e-10)
    throw std::runtime_error("HmmLatent: beta does not sum to 1");
  for (int j = 0; j < L(); ++j)
    if (std::fabs(pi.row(j).sum() - 1.0) > 1e-10)
      throw std::runtime_error("HmmLatent: pi row does not sum to 1");
  for (int zt : z)
    if (zt < 0 || zt >= L()) throw std::runtime_error("HmmLatent: label out of range");
  if (counts != transition_counts(z, L()))
    throw std::runtime_error("HmmLatent: stale transition counts");
}

void HmmLatent::compact(const std::vector<int>& keep) {
  if (!infinite)
    throw std::logic_error("HmmLatent::compact: weak-limit states are fixed");
  const int newL = static_cast<int>(keep.size());
  std::vector<int> relabel(L(), -1);
  for (int i = 0; i < newL; ++i) relabel[keep[i]] = i;
  if (relabel[0] != 0)
    throw std::logic_error("HmmLatent::compact: state 0 must be kept");

  VectorXd new_beta(newL + 1);
  double dropped_beta = 0.0;
  for (int k = 0; k < L(); ++k)
    if (relabel[k] < 0) dropped_beta += beta[k];
  for (int i = 0; i < newL; ++i) new_beta[i] = beta[keep[i]];
  new_beta[newL] = beta[L()] + dropped_beta;

  MatrixXd new_pi(newL, newL + 1);
  for (int i = 0; i < newL; ++i) {
    const int j = keep[i];
    double dropped = 0.0;
    for (int k = 0; k < L(); ++k)
      if (relabel[k] < 0) dropped += pi(j, k);
    for (int c = 0; c < newL; ++c) new_pi(i, c) = pi(j, keep[c]);
    new_pi(i, newL) = pi(j, L()) + dropped;
  }

  for (int& zt : z) {
    zt = relabel[zt];
    if (zt < 0) throw std::logic_error("HmmLatent::compact: dropped an occupied state");
  }
  beta = std::move(new_beta);
  pi = std::move(new_pi);
  recompute_counts();
}

VectorXi TableCounts::mbar_columns() const {
  VectorXi col = m.colwise().sum();
  for (int j = 0; j < overrides.size(); ++j) col[j] -= overrides[j];
  return col;
}

TableCounts sample_tables(const MatrixXi& counts, const VectorXd& beta,
                          double gamma, double rho, Rng& rng) {
  const int L = static_cast<int>(counts.rows());
  TableCounts tables;
  tables.m = MatrixXi::Zero(L, L);
  tables.overrides = VectorXi::Zero(L);
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < L; ++k) {
      const int n = counts(j, k);
      if (n == 0) continue;
      const double conc = gamma * ((1.0 - rho) * beta[k] + (j == k ? rho : 0.0));
      int m = 0;
      for (int i = 0; i < n; ++i)
        if (conc + i > 0.0 && rng.uniform() < conc / (conc + i)) ++m;
      if (m == 0) m = 1;  // the first customer always opens a table
      tables.m(j, k) = m;
    }
    // Each self-transition table came from the sticky mass with probability
    // rho / (rho + (1 - rho) beta_j).
    if (tables.m(j, j) > 0) {
      const double denom = rho + (1.0 - rho) * beta[j];
      const double p = denom > 0.0 ? rho / denom : 0.0;
      tables.overrides[j] = rng.binomial(tables.m(j, j), p);
    }
  }
  return tables;
}

VectorXd sample_beta_infinite(const TableCounts& tables, double tau, Rng& rng) {
  const VectorXi mbar = tables.mbar_columns();
  const int L = static_cast<int>(mbar.size());
  std::vector<double> conc(L + 1);
  for (int k = 0; k < L; ++k) conc[k] = static_cast<double>(mbar[k]);
  conc[L] = tau;
  auto w = rng.dirichlet(conc);
  return Eigen::Map<VectorXd>(w.data(), L + 1);
}

VectorXd sample_beta_weak_limit(const TableCounts& tables, double tau, int L,
                                Rng& rng) {
  const VectorXi mbar = tables.mbar_columns();
  std::vector<double> conc(L);
  for (int k = 0; k < L; ++k) conc[k] = tau / L + mbar[k];
  auto w = rng.dirichlet(conc);
  return Eigen::Map<VectorXd>(w.data(), L);
}

VectorXd sample_pi_row(int j, const VectorXd& beta, double gamma, double rho,
                       const VectorXi& counts_row, bool infinite, Rng& rng) {
  const int L = static_cast<int>(counts_row.size());
  const int cols = infinite ? L + 1 : L;
  if (beta.size() != cols)
    throw std::invalid_argument("sample_pi_row: beta/counts shape mismatch");
  std::vector<double> conc(cols);
  for (int k = 0; k < L; ++k)
    conc[k] = gamma * ((1.0 - rho) * beta[k] + (j == k ? rho : 0.0)) +
              counts_row[k];
  if (infinite) conc[L] = gamma * (1.0 - rho) * beta[L];
  auto w = rng.dirichlet(conc);
  return Eigen::Map<VectorXd>(w.data(), cols);
}

namespace {

// gamma's table likelihood is prod_j gamma^{m_j.} Gamma(gamma) /
// Gamma(gamma + n_j.) in both representations; the Beta/Bernoulli
// augmentation restores Gamma conjugacy.
void gamma_conjugate_update(ShdpHyper& current, const TableCounts& tables,
                            const MatrixXi& counts, const ShdpPriors& priors,
                            Rng& rng) {
  const int L = static_cast<int>(counts.rows());
  double shape = priors.gamma_shape + tables.total();
  double rate = priors.gamma_rate;
  for (int j = 0; j < L; ++j) {
    const int nj = counts.row(j).sum();
    if (nj == 0) continue;
    const double r = rng.beta(current.gamma + 1.0, nj);
    rate -= std::log(r);
    if (rng.uniform() < nj / (nj + current.gamma)) shape -= 1.0;
  }
  current.gamma = rng.gamma(std::max(shape, 1e-8)) / rate;
}

// Every table picked the sticky override with probability rho.
void rho_conjugate_update(ShdpHyper& current, const TableCounts& tables,
                          const ShdpPriors& priors, Rng& rng) {
  const int w = tables.override_total();
  current.rho =
      rng.beta(priors.rho_a + w, priors.rho_b + (tables.total() - w));
}

}  // namespace

ShdpHyper sample_hyperparameters_infinite(const TableCounts& tables,
                                          const MatrixXi& counts,
                                          ShdpHyper current,
                                          const ShdpPriors& priors, Rng& rng) {
  priors.validate();
  gamma_conjugate_update(current, tables, counts, priors, rng);
  rho_conjugate_update(current, tables, priors, rng);

  // tau: concentration of the top-level process whose customers are the
  // non-override tables; Escobar-West two-component mixture update.
  {
    const VectorXi mbar = tables.mbar_columns();
    const int mbar_total = mbar.sum();
    if (mbar_total == 0) {
      current.tau = rng.gamma(priors.tau_shape) / priors.tau_rate;
    } else {
      int kbar = 0;
      for (int k = 0; k < mbar.size(); ++k)
        if (mbar[k] > 0) ++kbar;
      const double eta = rng.beta(current.tau + 1.0, mbar_total);
      const double rate = priors.tau_rate - std::log(eta);
      const double odds = (priors.tau_shape + kbar - 1.0) / (mbar_total * rate);
      const double shape = rng.uniform() < odds / (1.0 + odds)
                               ? priors.tau_shape + kbar
                               : priors.tau_shape + kbar - 1.0;
      current.tau = rng.gamma(std::max(shape, 1e-8)) / rate;
    }
  }
  return current;
}

ShdpHyper sample_hyperparameters_weak_limit(const TableCounts& tables,
                                            const MatrixXi& counts, int L,
                                            ShdpHyper current,
                                            const ShdpPriors& priors, Rng& rng,
                                            int mh_steps) {
  priors.validate();
  gamma_conjugate_update(current, tables, counts, priors, rng);
  rho_conjugate_update(current, tables, priors, rng);

  // tau: the non-override tables draw their dishes through the
  // Dirichlet(tau/L) urn, so the exact conditional is count-based:
  // Gamma(tau)/Gamma(tau + mbar..) prod_k Gamma(tau/L + mbar_k) /
  // Gamma(tau/L)^L times the prior. One-dimensional Metropolis on log tau.
  const VectorXi mbar = tables.mbar_columns();
  const int mbar_total = mbar.sum();
  auto logtarget = [&](double tau) {
    double v = (priors.tau_shape - 1.0) * std::log(tau) - priors.tau_rate * tau;
    if (mbar_total == 0) return v;
    v += std::lgamma(tau) - std::lgamma(tau + mbar_total);
    for (int k = 0; k < L; ++k)
      if (mbar[k] > 0)
        v += std::lgamma(tau / L + mbar[k]) - std::lgamma(tau / L);
    return v;
  };
  for (int it = 0; it < mh_steps; ++it) {
    const double s = std::log(current.tau);
    const double s_new = s + 0.8 * rng.normal();
    const double tau_new = std::exp(s_new);
    const double diff =
        logtarget(tau_new) - logtarget(current.tau) + (s_new - s);
    if (std::log(rng.uniform()) < diff) current.tau = tau_new;
  }
  return current;
}

void expand_one_state(HmmLatent& latent, const ShdpHyper& hyp, Rng& rng) {
  if (!latent.infinite)
    throw std::logic_error("expand_one_state: weak-limit states are fixed");
  const int L = latent.L();
  const double beta_rem = latent.beta[L];

  // Break one stick off the global remainder.
  const double v = rng.beta(1.0, hyp.tau);
  const double beta_new = v * beta_rem;
  const double beta_rem_new = beta_rem - beta_new;

  VectorXd beta(L + 2);
  beta.head(L) = latent.beta.head(L);
  beta[L] = beta_new;
  beta[L + 1] = beta_rem_new;

  // Carve the new state's share out of every existing row's remainder; the
  // DP aggregation property makes this split Beta-distributed.
  MatrixXd pi(L + 1, L + 2);
  const double a = hyp.gamma * (1.0 - hyp.rho) * beta_new;
  const double b = hyp.gamma * (1.0 - hyp.rho) * beta_rem_new;
  for (int j = 0; j < L; ++j) {
    const double x = (a + b > 0.0) ? rng.beta(a, b) : 0.0;
    pi.row(j).head(L) = latent.pi.row(j).head(L);
    pi(j, L) = latent.pi(j, L) * x;
    pi(j, L + 1) = latent.pi(j, L) * (1.0 - x);
  }

  latent.beta = beta;
  // The new state's row is a fresh prior draw over the expanded support.
  VectorXi zero_counts = VectorXi::Zero(L + 1);
  pi.row(L) = sample_pi_row(L, latent.beta, hyp.gamma, hyp.rho, zero_counts,
                            /*infinite=*/true, rng);
  latent.pi = pi;
  latent.counts.conservativeResizeLike(MatrixXi::Zero(L + 1, L + 1));
}

int beam_sample_z(HmmLatent& latent, const ShdpHyper& hyp,
                  const EmissionLogLik& loglik,
                  const std::function<void()>& on_expand, Rng& rng) {
  const int T = latent.T();

  // Slice variables under the current path.
  std::vector<double> u(T);
  double u_min = 1.0;
  int prev = 0;
  for (int t = 0; t < T; ++t) {
    const double p = std::max(latent.pi(prev, latent.z[t]), 1e-300);
    u[t] = rng.uniform() * p;
    u_min = std::min(u_min, u[t]);
    prev = latent.z[t];
  }

  // Extend the truncation until no unrepresented state can clear a slice.
  int added = 0;
  if (latent.infinite) {
    for (;;) {
      double max_rem = 0.0;
      for (int j = 0; j < latent.L(); ++j)
        max_rem = std::max(max_rem, latent.pi(j, latent.L()));
      if (max_rem < u_min) break;
      expand_one_state(latent, hyp, rng);
      if (on_expand) on_expand();
      if (++added > 100000)
        throw std::runtime_error("beam_sample_z: runaway truncation growth");
    }
  }

  const int L = latent.L();
  MatrixXd alpha(T, L);
  std::vector<double> pred(L), like(L);

  for (int t = 0; t < T; ++t) {
    if (t == 0) {
      for (int k = 0; k < L; ++k) pred[k] = latent.pi(0, k) > u[0] ? 1.0 : 0.0;
    } else {
      for (int k = 0; k < L; ++k) {
        double s = 0.0;
        for (int j = 0; j < L; ++j)
          if (alpha(t - 1, j) > 0.0 && latent.pi(j, k) > u[t])
            s += alpha(t - 1, j);
        pred[k] = s;
      }
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < L; ++k) {
      if (pred[k] > 0.0) {
        like[k] = loglik(t, k);
        max_log = std::max(max_log, like[k]);
      }
    }
    if (!std::isfinite(max_log))
      throw std::runtime_error("beam_sample_z: no admissible state at t=" +
                               std::to_string(t));
    double total = 0.0;
    for (int k = 0; k < L; ++k) {
      double v = 0.0;
      if (pred[k] > 0.0) {
        // Slice-admissible states keep a tiny positive weight even when the
        // emission gap underflows exp(); otherwise the conditioning path
        // itself could be annihilated and the filter would go empty.
        v = std::max(pred[k] * std::exp(like[k] - max_log), 1e-290);
      }
      alpha(t, k) = v;
      total += v;
    }
    alpha.row(t) /= total;
  }

  // Backward pass.
  std::vector<double> w(L);
  {
    for (int k = 0; k < L; ++k) w[k] = alpha(T - 1, k);
    latent.z[T - 1] = rng.categorical(w);
  }
  for (int t = T - 2; t >= 0; --t) {
    for (int j = 0; j < L; ++j)
      w[j] = latent.pi(j, latent.z[t + 1]) > u[t + 1] ? alpha(t, j) : 0.0;
    latent.z[t] = rng.categorical(w);
  }
  latent.recompute_counts();
  return added;
}

void ffbs_refine_z(HmmLatent& latent, const EmissionLogLik& loglik, Rng& rng) {
  const int T = latent.T();
  const int L = latent.L();
  MatrixXd alpha(T, L);
  std::vector<double> like(L);
  for (int t = 0; t < T; ++t) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < L; ++k) {
      like[k] = loglik(t, k);
      max_log = std::max(max_log, like[k]);
    }
    double total = 0.0;
    for (int k = 0; k < L; ++k) {
      double pred;
      if (t == 0) {
        pred = latent.pi(0, k);
      } else {
        pred = 0.0;
        for (int j = 0; j < L; ++j) pred += alpha(t - 1, j) * latent.pi(j, k);
      }
      const double v = pred * std::exp(like[k] - max_log);
      alpha(t, k) = v;
      total += v;
    }
    if (!(total > 0.0))
      throw std::runtime_error("ffbs_refine_z: filter underflow");
    alpha.row(t) /= total;
  }
  std::vector<double> w(L);
  for (int k = 0; k < L; ++k) w[k] = alpha(T - 1, k);
  latent.z[T - 1] = rng.categorical(w);
  for (int t = T - 2; t >= 0; --t) {
    for (int j = 0; j < L; ++j)
      w[j] = alpha(t, j) * latent.pi(j, latent.z[t + 1]);
    latent.z[t] = rng.categorical(w);
  }
  latent.recompute_counts();
}

void direct_assignment_pass(HmmLatent& latent, const ShdpHyper& hyp,
                            const EmissionLogLik& loglik, Rng& rng) {
  const int T = latent.T();
  const int L = latent.L();
  MatrixXi counts = transition_counts(latent.z, L);
  VectorXi row_sums = counts.rowwise().sum();
  auto cell_conc = [&](int j, int k) {
    return hyp.gamma *
           ((1.0 - hyp.rho) * latent.beta[k] + (j == k ? hyp.rho : 0.0));
  };
  std::vector<double> w(L), lg(L);
  for (int t = 0; t < T; ++t) {
    const int prev = t > 0 ? latent.z[t - 1] : 0;
    const int old = latent.z[t];
    counts(prev, old) -= 1;
    row_sums[prev] -= 1;
    const int next = t + 1 < T ? latent.z[t + 1] : -1;
    if (next >= 0) {
      counts(old, next) -= 1;
      row_sums[old] -= 1;
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < L; ++k) {
      double v = loglik(t, k) +
                 std::log(cell_conc(prev, k) + counts(prev, k));
      if (next >= 0) {
        const double self_in = prev == k ? 1.0 : 0.0;
        v += std::log(cell_conc(k, next) + counts(k, next) +
                      (prev == k && k == next ? 1.0 : 0.0));
        v -= std::log(hyp.gamma + row_sums[k] + self_in);
      }
      lg[k] = v;
      max_log = std::max(max_log, v);
    }
    for (int k = 0; k < L; ++k) w[k] = std::exp(lg[k] - max_log);
    const int zt = rng.categorical(w);
    latent.z[t] = zt;
    counts(prev, zt) += 1;
    row_sums[prev] += 1;
    if (next >= 0) {
      counts(zt, next) += 1;
      row_sums[zt] += 1;
    }
  }
  latent.recompute_counts();
}

HmmLatent weak_limit_prior_draw(const ShdpHyper& hyp, int L, int T, Rng& rng) {
  HmmLatent latent;
  latent.infinite = false;
  std::vector<double> conc(L, hyp.tau / L);
  auto b = rng.dirichlet(conc);
  latent.beta = Eigen::Map<VectorXd>(b.data(), L);
  latent.pi.resize(L, L);
  VectorXi zeros = VectorXi::Zero(L);
  for (int j = 0; j < L; ++j)
    latent.pi.row(j) =
        sample_pi_row(j, latent.beta, hyp.gamma, hyp.rho, zeros, false, rng);
  latent.z.resize(T);
  int prev = 0;
  std::vector<double> row(L);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < L; ++k) row[k] = latent.pi(prev, k);
    latent.z[t] = rng.categorical(row);
    prev = latent.z[t];
  }
  latent.recompute_counts();
  return latent;
}

std::vector<int> prior_k_simulate(const ShdpPriors& priors, int T, int L,
                                  int draws, Rng& rng) {
  priors.validate();
  if (T < 1 || L < 1 || draws < 1)
    throw std::invalid_argument("prior_k_simulate: T, L, draws must be positive");
  std::vector<int> ks;
  ks.reserve(draws);
  std::vector<double> beta_cum(L);
  for (int it = 0; it < draws; ++it) {
    const ShdpHyper hyp = priors.sample(rng);
    // Degree-L weak-limit global weights.
    double total = 0.0;
    for (int k = 0; k < L; ++k) {
      beta_cum[k] = rng.gamma(hyp.tau / L);
      total += beta_cum[k];
    }
    double acc = 0.0;
    if (total <= 0.0) {
      // Whole draw underflowed; the mass concentrates on one atom.
      const int k0 = static_cast<int>(rng.uniform_index(L));
      for (int k = 0; k < L; ++k) beta_cum[k] = k >= k0 ? 1.0 : 0.0;
    } else {
      for (int k = 0; k < L; ++k) {
        acc += beta_cum[k] / total;
        beta_cum[k] = acc;
      }
      beta_cum[L - 1] = 1.0;
    }
    // Rows realized lazily through their Polya urns: a draw from a
    // Dirichlet row given earlier draws repeats one of them with
    // probability count/(gamma + count), otherwise samples the base.
    std::unordered_map<int, std::vector<int>> urns;
    std::vector<char> visited(L, 0);
    int z = 0, k_count = 0;
    for (int t = 0; t < T; ++t) {
      auto& urn = urns[z];
      int next;
      const double c = static_cast<double>(urn.size());
      if (c > 0.0 && rng.uniform() < c / (hyp.gamma + c)) {
        next = urn[rng.uniform_index(urn.size())];
      } else if (rng.uniform() < hyp.rho) {
        next = z;
      } else {
        const double v = rng.uniform();
        next = static_cast<int>(
            std::lower_bound(beta_cum.begin(), beta_cum.end(), v) -
            beta_cum.begin());
        next = std::min(next, L - 1);
      }
      urn.push_back(next);
      if (!visited[next]) {
        visited[next] = 1;
        ++k_count;
      }
      z = next;
    }
    ks.push_back(k_count);
  }
  return ks;
}

}  // namespace jpsn
