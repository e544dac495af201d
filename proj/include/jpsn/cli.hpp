#ifndef JPSN_CLI_HPP
#define JPSN_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jpsn/config.hpp"
#include "jpsn/gibbs.hpp"
#include "jpsn/scoring.hpp"
#include "jpsn/series.hpp"

namespace jpsn {

// Exit codes: 0 success, 2 validation/usage errors, 3 numerical failures.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

struct SimulationTruth {
  CircLinSeries data;
  std::vector<int> labels;           // 1-based state labels
  std::vector<JpsnParams> states;
  MatrixXd transition;
};

/// Generative draw from a configured JPSN hidden Markov model.
SimulationTruth simulate_from_config(KeyValueConfig& cfg,
                                     std::optional<std::uint64_t> seed_override);

/// Parse a fit configuration file into a FitConfig.
FitConfig fit_config_from(KeyValueConfig& cfg,
                          std::optional<std::uint64_t> seed_override);

void cmd_simulate(const std::string& config_path, const std::string& out_path,
                  std::optional<std::uint64_t> seed);

void cmd_fit(const std::string& data_path, const std::string& config_path,
             const std::string& out_dir, std::optional<std::uint64_t> seed,
             int chains, bool degrees, bool quiet);

struct ScoreRow {
  std::string model;
  int k_hat = 0;
  double crps_circular = 0.0;
  double crps_linear = 0.0;
};

std::vector<ScoreRow> cmd_score(const std::string& data_path, double holdout,
                                const std::vector<std::string>& config_paths,
                                const std::string& out_dir,
                                std::uint64_t seed, bool degrees, bool quiet);

struct PriorKReport {
  std::vector<int> draws;
  double lo95 = 0.0;   // 2.5% quantile
  double hi95 = 0.0;   // 97.5% quantile
  double median = 0.0;
};

PriorKReport cmd_prior_k(const std::string& config_path, int T, int L,
                         int draws, std::uint64_t seed);

void cmd_derive_metrics(const std::vector<std::string>& track_paths,
                        const std::string& out_path);

void cmd_summarize(const std::string& store_dir, const std::string& out_dir,
                   bool grids, int grid_points);

/// Full command-line front end; returns a process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace jpsn

#endif  // JPSN_CLI_HPP
