#pragma once

#include "cli/commands.hpp"
#include "cli/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace scapm::cli {

enum class CriterionStatus { kPass, kFail, kSkip };

struct CriterionResult {
  int id = 0;
  std::string name;
  CriterionStatus status = CriterionStatus::kFail;
  std::string detail;
  double seconds = 0.0;
};

std::string format_result(const CriterionResult& r);

/// Two assets, two Brownian factors: r = 0.02, mu = (0.08, 0.05),
/// sigma = [[0.2, 0], [0.1, 0.3]]. theta = (0.3, 0), disc = (0.1, 0).
MarketSpec running_example();

/// Same r and sigma, with mu = r1 + sigma sigma^0 so that SCAPM holds.
MarketSpec scapm_market(const MarketSpec& base);

/// Same r and sigma, with mu chosen so that theta = sigma^0 + disc.
MarketSpec market_with_discrepancy(const MarketSpec& base, const Eigen::VectorXd& disc);

struct AcceptanceContext {
  MarketConfig config{false, {Segment{0.0, running_example()}}};
  VerifyLevel level = VerifyLevel::kFull;
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

// Individual criteria; the sizes are the full-level values unless noted.
CriterionResult check_central_identity(std::size_t n_specs, std::size_t paths, std::size_t steps,
                                       const MarketConfig& config, std::uint64_t seed,
                                       unsigned threads);
CriterionResult check_asymptotic_rate(const MarketSpec& spec, std::size_t paths,
                                      std::uint64_t seed, unsigned threads);
CriterionResult check_finite_horizon_dichotomy(std::size_t paths, std::uint64_t seed,
                                               unsigned threads);
CriterionResult check_threshold_arithmetic();
CriterionResult check_scapm_fixed_point(const MarketSpec& base, std::size_t paths,
                                        std::size_t steps, std::uint64_t seed, unsigned threads);
CriterionResult check_growth_identity(const MarketSpec& spec, std::size_t paths, double horizon,
                                      std::uint64_t seed, unsigned threads);
CriterionResult check_replication_convergence(const MarketSpec& spec, std::size_t paths,
                                              unsigned coarsest_log2_steps, std::uint64_t seed);
CriterionResult check_determinism(const MarketConfig& config, std::uint64_t seed);
CriterionResult check_quantile_quality();

/// The p-grid for the quantile round trip: 200 log-spaced points in
/// [1e-6, 0.5] and their mirror images 1 - p.
std::vector<double> quantile_grid();

std::vector<CriterionResult> run_acceptance(const AcceptanceContext& ctx);

}  // namespace scapm::cli
