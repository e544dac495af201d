#include "jpsn/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "jpsn/angle.hpp"
#include "jpsn/store.hpp"

namespace jpsn {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

SimulationTruth simulate_from_config(
    KeyValueConfig& cfg, std::optional<std::uint64_t> seed_override) {
  const int T = static_cast<int>(cfg.get_int("T"));
  const int n = static_cast<int>(cfg.get_int("n"));
  const int q = static_cast<int>(cfg.get_int("q"));
  const int states = static_cast<int>(cfg.get_int("states"));
  const double missing_frac = cfg.get_double("missing_frac", 0.0);
  const std::uint64_t seed =
      seed_override.value_or(static_cast<std::uint64_t>(cfg.get_int("seed", 1)));
  if (T < 2 || n < 0 || q < 0 || n + q == 0 || states < 1)
    throw std::invalid_argument("simulate: invalid dimensions");
  if (missing_frac < 0.0 || missing_frac >= 1.0)
    throw std::invalid_argument("simulate: missing_frac must lie in [0, 1)");
  const int p = 2 * n + q;
  Rng rng(seed);

  SimulationTruth out;
  out.transition.resize(states, states);
  bool explicit_rows = cfg.has("trans_row_1");
  if (explicit_rows) {
    for (int k = 0; k < states; ++k) {
      auto row = cfg.get_doubles("trans_row_" + std::to_string(k + 1));
      if (static_cast<int>(row.size()) != states)
        throw std::invalid_argument("simulate: trans_row has wrong length");
      double sum = 0.0;
      for (double v : row) sum += v;
      for (int c = 0; c < states; ++c) out.transition(k, c) = row[c] / sum;
    }
  } else {
    const double self = cfg.get_double("self_prob", 0.9);
    if (!(self > 0.0 && self <= 1.0))
      throw std::invalid_argument("simulate: self_prob must lie in (0, 1]");
    const double off = states > 1 ? (1.0 - self) / (states - 1) : 0.0;
    for (int k = 0; k < states; ++k)
      for (int c = 0; c < states; ++c)
        out.transition(k, c) = k == c ? (states > 1 ? self : 1.0) : off;
  }

  const std::string mode = cfg.get_string("emission", "explicit");
  for (int k = 0; k < states; ++k) {
    JpsnParams s;
    s.n = n;
    s.q = q;
    const std::string prefix = "state_" + std::to_string(k + 1) + "_";
    if (mode == "explicit") {
      auto mu = cfg.get_doubles(prefix + "mu");
      if (static_cast<int>(mu.size()) != p)
        throw std::invalid_argument("simulate: " + prefix + "mu needs " +
                                    std::to_string(p) + " values");
      s.mu = Eigen::Map<VectorXd>(mu.data(), p);
      if (cfg.has(prefix + "sigma_diag")) {
        auto d = cfg.get_doubles(prefix + "sigma_diag");
        if (static_cast<int>(d.size()) != p)
          throw std::invalid_argument("simulate: " + prefix + "sigma_diag needs " +
                                      std::to_string(p) + " values");
        s.sigma = Eigen::Map<VectorXd>(d.data(), p).asDiagonal();
      } else {
        auto tri = cfg.get_doubles(prefix + "sigma");
        if (static_cast<int>(tri.size()) != p * (p + 1) / 2)
          throw std::invalid_argument("simulate: " + prefix + "sigma needs " +
                                      std::to_string(p * (p + 1) / 2) +
                                      " lower-triangle values");
        s.sigma.resize(p, p);
        int idx = 0;
        for (int r = 0; r < p; ++r)
          for (int c = 0; c <= r; ++c) {
            s.sigma(r, c) = tri[idx];
            s.sigma(c, r) = tri[idx];
            ++idx;
          }
      }
      auto lam = cfg.get_doubles(prefix + "lambda",
                                 std::vector<double>(q, 0.0));
      if (static_cast<int>(lam.size()) != q)
        throw std::invalid_argument("simulate: " + prefix + "lambda needs " +
                                    std::to_string(q) + " values");
      s.lambda = Eigen::Map<VectorXd>(lam.data(), q);
    } else if (mode == "random") {
      const double mu_sd = cfg.get_double("random_mu_sd", 2.0);
      const double lambda_sd = cfg.get_double("random_lambda_sd", 1.0);
      NiwHyper h;
      h.mu0 = VectorXd::Zero(p);
      h.kappa = 1.0;
      h.dof = p + 4;
      h.psi = (h.dof - p - 1) * MatrixXd::Identity(p, p);
      auto [mu, sigma] = niw_sample(h, rng);
      s.mu = mu_sd * mu;
      s.sigma = sigma;
      s.lambda.resize(q);
      for (int j = 0; j < q; ++j) s.lambda[j] = lambda_sd * rng.normal();
    } else {
      throw std::invalid_argument("simulate: emission must be explicit or random");
    }
    s.validate();
    out.states.push_back(std::move(s));
  }
  cfg.finish();

  out.data = CircLinSeries::empty(T, n, q);
  out.labels.resize(T);
  int z = 0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> row(states);
    for (int c = 0; c < states; ++c) row[c] = out.transition(z, c);
    z = rng.categorical(row);
    out.labels[t] = z + 1;
    JpsnDraw draw = jpsn_sample(out.states[z], rng);
    for (int i = 0; i < n; ++i) {
      out.data.theta(t, i) = draw.theta[i].value();
      out.data.theta_missing(t, i) = false;
    }
    for (int j = 0; j < q; ++j) {
      out.data.y(t, j) = draw.y[j];
      out.data.y_missing(t, j) = false;
    }
  }
  if (missing_frac > 0.0) {
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < n; ++i)
        if (rng.uniform() < missing_frac) {
          out.data.theta_missing(t, i) = true;
          out.data.theta(t, i) = std::numeric_limits<double>::quiet_NaN();
        }
      for (int j = 0; j < q; ++j)
        if (rng.uniform() < missing_frac) {
          out.data.y_missing(t, j) = true;
          out.data.y(t, j) = std::numeric_limits<double>::quiet_NaN();
        }
    }
  }
  return out;
}

void cmd_simulate(const std::string& config_path, const std::string& out_path,
                  std::optional<std::uint64_t> seed) {
  KeyValueConfig cfg = KeyValueConfig::from_file(config_path);
  SimulationTruth truth = simulate_from_config(cfg, seed);
  write_dataset(truth.data, out_path);
  {
    std::ofstream out(out_path + ".truth_labels.tsv");
    out << "t\tstate\n";
    for (std::size_t t = 0; t < truth.labels.size(); ++t)
      out << t + 1 << "\t" << truth.labels[t] << "\n";
  }
  {
    std::ofstream out(out_path + ".truth_params.txt");
    out.precision(17);
    out << "states = " << truth.states.size() << "\n";
    for (Eigen::Index r = 0; r < truth.transition.rows(); ++r) {
      out << "trans_row_" << r + 1 << " =";
      for (Eigen::Index c = 0; c < truth.transition.cols(); ++c)
        out << " " << truth.transition(r, c);
      out << "\n";
    }
    for (std::size_t k = 0; k < truth.states.size(); ++k) {
      IdentifiedJpsnParams ip = identify(truth.states[k]);
      out << "state_" << k + 1 << "_mu_tilde =";
      for (Eigen::Index c = 0; c < ip.mu_tilde.size(); ++c)
        out << " " << ip.mu_tilde[c];
      out << "\n";
      out << "state_" << k + 1 << "_sigma_tilde_lower =";
      for (Eigen::Index r = 0; r < ip.sigma_tilde.rows(); ++r)
        for (Eigen::Index c = 0; c <= r; ++c) out << " " << ip.sigma_tilde(r, c);
      out << "\n";
      out << "state_" << k + 1 << "_lambda =";
      for (Eigen::Index j = 0; j < ip.lambda.size(); ++j)
        out << " " << ip.lambda[j];
      out << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

FitConfig fit_config_from(KeyValueConfig& cfg,
                          std::optional<std::uint64_t> seed_override) {
  FitConfig fc;
  fc.iterations = static_cast<int>(cfg.get_int("iterations", fc.iterations));
  fc.burnin = static_cast<int>(cfg.get_int("burnin", fc.burnin));
  fc.thin = static_cast<int>(cfg.get_int("thin", fc.thin));
  fc.family = parse_family(cfg.get_string("family", "jpsn"));
  fc.seed = seed_override.value_or(
      static_cast<std::uint64_t>(cfg.get_int("seed", 1)));
  fc.initial_states = static_cast<int>(
      cfg.get_int("initial_states", fc.initial_states));
  const std::string backend = cfg.get_string("backend", "beam");
  if (backend == "weaklimit")
    fc.weak_limit = true;
  else if (backend != "beam")
    throw std::invalid_argument("fit: backend must be beam or weaklimit");
  fc.truncation = static_cast<int>(cfg.get_int("truncation", fc.truncation));
  fc.shdp.tau_shape = cfg.get_double("tau_shape", fc.shdp.tau_shape);
  fc.shdp.tau_rate = cfg.get_double("tau_rate", fc.shdp.tau_rate);
  fc.shdp.gamma_shape = cfg.get_double("gamma_shape", fc.shdp.gamma_shape);
  fc.shdp.gamma_rate = cfg.get_double("gamma_rate", fc.shdp.gamma_rate);
  fc.shdp.rho_a = cfg.get_double("rho_a", fc.shdp.rho_a);
  fc.shdp.rho_b = cfg.get_double("rho_b", fc.shdp.rho_b);
  fc.niw_kappa = cfg.get_double("niw_kappa", fc.niw_kappa);
  fc.niw_dof = cfg.get_double("niw_dof", fc.niw_dof);
  fc.niw_psi_scale = cfg.get_double("niw_psi_scale", fc.niw_psi_scale);
  fc.lambda_prior_mean = cfg.get_double("lambda_prior_mean", fc.lambda_prior_mean);
  fc.lambda_prior_var = cfg.get_double("lambda_prior_var", fc.lambda_prior_var);
  fc.baseline_prior_shape =
      cfg.get_double("baseline_prior_shape", fc.baseline_prior_shape);
  fc.baseline_prior_rate =
      cfg.get_double("baseline_prior_rate", fc.baseline_prior_rate);
  fc.validate();
  return fc;
}

namespace {

void write_run_info(const fs::path& dir, double wall_seconds) {
  // Timing lives outside manifest.json so identical seeds keep the actual
  // outputs bit-identical.
  std::ofstream out(dir / "run_info.txt");
  out << "wall_seconds = " << wall_seconds << "\n";
}

std::map<std::string, std::string> manifest_extras(const KeyValueConfig& cfg,
                                                   const FitConfig& fc,
                                                   const std::string& command) {
  std::map<std::string, std::string> extra;
  extra["command"] = command;
  extra["config"] = cfg.canonical();
  extra["config_hash"] = std::to_string(fnv1a(cfg.canonical()));
  extra["backend"] = fc.weak_limit ? "weaklimit" : "beam";
  extra["iterations"] = std::to_string(fc.iterations);
  extra["burnin"] = std::to_string(fc.burnin);
  extra["thin"] = std::to_string(fc.thin);
  extra["version"] = "0.1.0";
  return extra;
}

}  // namespace

void cmd_fit(const std::string& data_path, const std::string& config_path,
             const std::string& out_dir, std::optional<std::uint64_t> seed,
             int chains, bool degrees, bool quiet) {
  if (chains < 1) throw std::invalid_argument("fit: chains must be positive");
  CircLinSeries data = read_dataset(data_path, degrees);
  KeyValueConfig cfg = KeyValueConfig::from_file(config_path);
  FitConfig fc = fit_config_from(cfg, seed);
  cfg.finish();

  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  auto progress = [&](int it, int total) {
    if (quiet) return;
    if (it % std::max(1, total / 20) == 0 || it == total)
      std::cerr << "\r[fit] sweep " << it << "/" << total << std::flush;
  };

  if (chains == 1) {
    PosteriorSamples post = fit(data, fc, progress);
    if (!quiet) std::cerr << "\n";
    write_store(post, out_dir, manifest_extras(cfg, fc, "fit"));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_run_info(out_dir, wall);
    return;
  }

  std::vector<PosteriorSamples> posts(chains);
  std::vector<std::thread> workers;
  for (int c = 0; c < chains; ++c) {
    workers.emplace_back([&, c]() {
      FitConfig chain_cfg = fc;
      chain_cfg.seed = c == 0 ? fc.seed : derive_seed(fc.seed, c);
      posts[c] = fit(data, chain_cfg, {});
    });
  }
  for (auto& w : workers) w.join();
  auto extra = manifest_extras(cfg, fc, "fit");
  extra["chains"] = std::to_string(chains);
  for (int c = 0; c < chains; ++c)
    write_store(posts[c], (fs::path(out_dir) / ("chain_" + std::to_string(c))).string(),
                extra);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_run_info(out_dir, wall);
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

std::vector<ScoreRow> cmd_score(const std::string& data_path, double holdout,
                                const std::vector<std::string>& config_paths,
                                const std::string& out_dir,
                                std::uint64_t seed, bool degrees, bool quiet) {
  if (config_paths.empty())
    throw std::invalid_argument("score: need at least one model config");
  if (!(holdout > 0.0))
    throw std::invalid_argument(
        "score: holdout fraction must be positive (nothing to score otherwise)");
  CircLinSeries data = read_dataset(data_path, degrees);
  HoldoutPlan plan = make_holdout_plan(data, holdout, seed);
  CircLinSeries masked = apply_holdout(data, plan);

  fs::create_directories(out_dir);
  std::vector<ScoreRow> rows;
  for (std::size_t m = 0; m < config_paths.size(); ++m) {
    KeyValueConfig cfg = KeyValueConfig::from_file(config_paths[m]);
    std::optional<std::uint64_t> fit_seed;
    if (!cfg.has("seed"))
      fit_seed = derive_seed(seed, 1000 + m);
    FitConfig fc = fit_config_from(cfg, fit_seed);
    cfg.finish();
    if (!quiet)
      std::cerr << "[score] fitting model " << m + 1 << "/"
                << config_paths.size() << " (" << family_name(fc.family)
                << ")\n";
    PosteriorSamples post = fit(masked, fc, {});
    const std::string model_dir =
        (fs::path(out_dir) / ("model_" + std::to_string(m + 1))).string();
    write_store(post, model_dir, manifest_extras(cfg, fc, "score"));
    CrpsReport report = score_holdout(post, data, plan);
    ScoreRow row;
    row.model = fs::path(config_paths[m]).filename().string() + ":" +
                family_name(fc.family);
    row.k_hat = post.modal_k();
    row.crps_circular = report.circular_mean;
    row.crps_linear = report.linear_mean;
    rows.push_back(row);
  }
  std::ofstream out(fs::path(out_dir) / "crps_comparison.tsv");
  out << "model\tK_hat\tCRPSc\tCRPSl\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.model << "\t" << r.k_hat << "\t" << r.crps_circular << "\t"
        << r.crps_linear << "\n";
  return rows;
}

// ---------------------------------------------------------------------------
// prior-k
// ---------------------------------------------------------------------------

PriorKReport cmd_prior_k(const std::string& config_path, int T, int L,
                         int draws, std::uint64_t seed) {
  ShdpPriors priors;
  if (!config_path.empty()) {
    KeyValueConfig cfg = KeyValueConfig::from_file(config_path);
    priors.tau_shape = cfg.get_double("tau_shape", priors.tau_shape);
    priors.tau_rate = cfg.get_double("tau_rate", priors.tau_rate);
    priors.gamma_shape = cfg.get_double("gamma_shape", priors.gamma_shape);
    priors.gamma_rate = cfg.get_double("gamma_rate", priors.gamma_rate);
    priors.rho_a = cfg.get_double("rho_a", priors.rho_a);
    priors.rho_b = cfg.get_double("rho_b", priors.rho_b);
    cfg.finish();
  }
  Rng rng(seed);
  PriorKReport report;
  report.draws = prior_k_simulate(priors, T, L, draws, rng);
  std::vector<double> vals(report.draws.begin(), report.draws.end());
  report.lo95 = empirical_quantile(vals, 0.025);
  report.hi95 = empirical_quantile(vals, 0.975);
  report.median = empirical_quantile(vals, 0.5);
  return report;
}

// ---------------------------------------------------------------------------
// derive-metrics
// ---------------------------------------------------------------------------

void cmd_derive_metrics(const std::vector<std::string>& track_paths,
                        const std::string& out_path) {
  if (track_paths.empty())
    throw std::invalid_argument("derive-metrics: need at least one track file");
  struct Track {
    std::vector<double> x, y;
  };
  std::vector<Track> tracks;
  for (const auto& path : track_paths) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open track: " + path);
    std::string line;
    if (!std::getline(in, line))
      throw std::invalid_argument(path + ": empty track");
    Track tr;
    int row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      std::istringstream ss(line);
      double x, y;
      if (!(ss >> x >> y))
        throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                    ": expected two coordinates");
      tr.x.push_back(x);
      tr.y.push_back(y);
    }
    if (tr.x.size() < 3)
      throw std::invalid_argument(path + ": need at least 3 fixes");
    if (!tracks.empty() && tracks.front().x.size() != tr.x.size())
      throw std::invalid_argument(path + ": all tracks must share the time grid");
    tracks.push_back(std::move(tr));
  }

  const int m = static_cast<int>(tracks.size());
  const int T = static_cast<int>(tracks.front().x.size()) - 1;  // steps
  CircLinSeries out = CircLinSeries::empty(T, m, m);
  for (int a = 0; a < m; ++a) {
    const Track& tr = tracks[a];
    std::vector<double> bearing(T);
    std::vector<bool> has_bearing(T, false);
    for (int t = 0; t < T; ++t) {
      const double dx = tr.x[t + 1] - tr.x[t];
      const double dy = tr.y[t + 1] - tr.y[t];
      const double len = std::hypot(dx, dy);
      if (len > 0.0) {
        bearing[t] = std::atan2(dy, dx);
        has_bearing[t] = true;
        out.y(t, a) = std::log(len);
        out.y_missing(t, a) = false;
      }
      // zero-displacement steps leave both metrics missing: the bearing is
      // undefined and log(0) diverges
    }
    for (int t = 1; t < T; ++t) {
      if (has_bearing[t] && has_bearing[t - 1]) {
        out.theta(t, a) = wrap_angle(bearing[t] - bearing[t - 1]);
        out.theta_missing(t, a) = false;
      }
    }
  }
  write_dataset(out, out_path);
}

// ---------------------------------------------------------------------------
// summarize
// ---------------------------------------------------------------------------

namespace {

PosteriorSamples load_store_merged(const std::string& store_dir) {
  if (fs::exists(fs::path(store_dir) / "chain_0")) {
    PosteriorSamples merged;
    bool first = true;
    for (int c = 0;; ++c) {
      const fs::path chain = fs::path(store_dir) / ("chain_" + std::to_string(c));
      if (!fs::exists(chain)) break;
      PosteriorSamples part = read_store(chain.string());
      if (first) {
        merged = std::move(part);
        first = false;
      } else {
        for (auto& s : part.sweeps) merged.sweeps.push_back(std::move(s));
      }
    }
    return merged;
  }
  return read_store(store_dir);
}

}  // namespace

void cmd_summarize(const std::string& store_dir, const std::string& out_dir,
                   bool grids, int grid_points) {
  PosteriorSamples post = load_store_merged(store_dir);
  Summary summary = summarize(post);
  write_summary(summary, post, out_dir);
  if (!grids) return;
  const int K = summary.k_hat;
  const int G = grid_points;
  for (int i = 0; i < post.n; ++i) {
    VectorXd grid(G);
    for (int g = 0; g < G; ++g) grid[g] = two_pi * g / G;
    for (int a = 0; a < K; ++a) {
      VectorXd dens = marginal_density_grid(post, true, i, a, grid);
      std::ofstream out(fs::path(out_dir) /
                        ("density_theta_" + std::to_string(i + 1) + "_state" +
                         std::to_string(a + 1) + ".tsv"));
      out.precision(17);
      for (int g = 0; g < G; ++g) out << grid[g] << "\t" << dens[g] << "\n";
    }
  }
  for (int j = 0; j < post.q; ++j) {
    // Span the observed imputation range generously.
    double lo = -5.0, hi = 5.0;
    for (const auto& s : post.sweeps)
      for (std::size_t k = 0; k < s.states.size(); ++k) {
        if (post.family != EmissionFamilyKind::jpsn) continue;
        const double mu = s.states[k].jpsn.mu_tilde[2 * post.n + j];
        lo = std::min(lo, mu - 5.0);
        hi = std::max(hi, mu + 5.0);
      }
    VectorXd grid(G);
    for (int g = 0; g < G; ++g) grid[g] = lo + (hi - lo) * g / (G - 1.0);
    for (int a = 0; a < K; ++a) {
      VectorXd dens = marginal_density_grid(post, false, j, a, grid);
      std::ofstream out(fs::path(out_dir) /
                        ("density_y_" + std::to_string(j + 1) + "_state" +
                         std::to_string(a + 1) + ".tsv"));
      out.precision(17);
      for (int g = 0; g < G; ++g) out << grid[g] << "\t" << dens[g] << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// front end
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Bayesian circular-linear hidden Markov modeling"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, store_dir;
  std::vector<std::string> configs, tracks;
  std::uint64_t seed = 1;
  bool seed_set = false, degrees = false, quiet = false, grids = false;
  int chains = 1, arg_T = 3000, arg_L = 1000, arg_draws = 10000;
  int grid_points = 200;
  double holdout = 0.1;

  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  sim->add_option("--config", config_path, "simulation config")->required();
  sim->add_option("--out", out_path, "dataset path to write")->required();
  sim->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  auto* fit_cmd = app.add_subcommand("fit", "run the MCMC sampler");
  fit_cmd->add_option("--data", data_path, "dataset file")->required();
  fit_cmd->add_option("--config", config_path, "fit config")->required();
  fit_cmd->add_option("--out", out_path, "sample store directory")->required();
  fit_cmd->add_option("--seed", seed, "seed override")
      ->each([&](const std::string&) { seed_set = true; });
  fit_cmd->add_option("--chains", chains, "independent chains");
  fit_cmd->add_flag("--degrees", degrees, "angles are in degrees");
  fit_cmd->add_flag("--quiet", quiet, "suppress progress output");

  auto* score = app.add_subcommand("score", "holdout CRPS model comparison");
  score->add_option("--data", data_path, "dataset file")->required();
  score->add_option("--holdout", holdout, "holdout fraction")->required();
  score->add_option("--config", configs, "model config (repeatable)")->required();
  score->add_option("--out", out_path, "output directory")->required();
  score->add_option("--seed", seed, "holdout/fit seed");
  score->add_flag("--degrees", degrees, "angles are in degrees");
  score->add_flag("--quiet", quiet, "suppress progress output");

  auto* pk = app.add_subcommand("prior-k", "simulate the prior on K");
  pk->add_option("--config", config_path, "hyper-prior config (optional)");
  pk->add_option("--T", arg_T, "chain length");
  pk->add_option("--L", arg_L, "weak-limit degree");
  pk->add_option("--draws", arg_draws, "number of prior draws");
  pk->add_option("--seed", seed, "seed");
  pk->add_option("--out", out_path, "optional file for the K draws");

  auto* derive = app.add_subcommand(
      "derive-metrics", "turning angles and log step lengths from tracks");
  derive->add_option("tracks", tracks, "track files (x<TAB>y per fix)")
      ->required();
  derive->add_option("--out", out_path, "dataset path to write")->required();

  auto* summ = app.add_subcommand("summarize", "posterior report from a store");
  summ->add_option("--store", store_dir, "sample store directory")->required();
  summ->add_option("--out", out_path, "report directory")->required();
  summ->add_flag("--grids", grids, "emit marginal density grids");
  summ->add_option("--grid-points", grid_points, "grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }

  try {
    if (sim->parsed()) {
      cmd_simulate(config_path, out_path,
                   seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    } else if (fit_cmd->parsed()) {
      cmd_fit(data_path, config_path, out_path,
              seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
              chains, degrees, quiet);
    } else if (score->parsed()) {
      auto rows = cmd_score(data_path, holdout, configs, out_path, seed,
                            degrees, quiet);
      std::cout << "model\tK_hat\tCRPSc\tCRPSl\n";
      for (const auto& r : rows)
        std::cout << r.model << "\t" << r.k_hat << "\t" << r.crps_circular
                  << "\t" << r.crps_linear << "\n";
    } else if (pk->parsed()) {
      PriorKReport report = cmd_prior_k(config_path, arg_T, arg_L, arg_draws, seed);
      std::cout << "draws\t" << report.draws.size() << "\n";
      std::cout << "median_K\t" << report.median << "\n";
      std::cout << "central95\t[" << report.lo95 << ", " << report.hi95
                << "]\n";
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << "K\n";
        for (int k : report.draws) out << k << "\n";
      }
    } else if (derive->parsed()) {
      cmd_derive_metrics(tracks, out_path);
    } else if (summ->parsed()) {
      cmd_summarize(store_dir, out_path, grids, grid_points);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_ok;
}

}  // namespace jpsn
