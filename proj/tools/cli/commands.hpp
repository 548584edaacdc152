#pragma once

#include "cli/config.hpp"
#include "cli/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scapm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNonViable = 3,
  kExitAcceptance = 4,
  kExitIo = 5,
};

/// Seed used when --seed is absent: $SCAPM_SEED if set, else 1.
std::uint64_t default_seed();

struct AnalyzeOptions {
  std::string config_path;
  std::vector<double> epsilons{0.05};
  std::vector<double> deltas{0.05};
  std::vector<double> horizons;  ///< empty: 100 for a market, total duration for a schedule
  std::optional<std::string> out;
};

int run_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string config_path;
  std::size_t paths = 1000;
  std::size_t steps = 250;
  std::optional<double> horizon;  ///< required for a single market
  std::uint64_t seed = 1;
  std::optional<std::string> full_paths;
  std::optional<std::string> out;
  unsigned threads = 0;
  std::size_t max_full_rows = 5'000'000;
};

struct SimulationSummary {
  std::size_t n_paths = 0;
  double max_identity_residual = 0.0;
  double mean_excess_log_wealth = 0.0;  ///< mean of log K_T - log S^0_T
  double integrated_disc_sq = 0.0;
};

/// Path statistics as CSV (manifest header, then one row per path).
/// Optionally writes every grid point of every path to `full`.
SimulationSummary write_simulation(const MarketConfig& config, const SimulateOptions& opts,
                                   const RunManifest& manifest, std::ostream& csv,
                                   std::ostream* full);

int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

enum class VerifyLevel { kQuick, kFull };

struct VerifyOptions {
  std::string config_path;
  VerifyLevel level = VerifyLevel::kQuick;
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

int run_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace scapm::cli
