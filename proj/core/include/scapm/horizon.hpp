#pragma once

#include "scapm/market_model.hpp"
#include "scapm/simulation.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace scapm {

enum class Verdict { kOutperformsWhp, kScapmApproxHolds };

std::string_view to_string(Verdict v);

struct Thresholds {
  double weak = 0.0;      ///< (z_eps + sqrt(z_eps^2 + 2 ln(1/delta))) / sqrt(T)
  double loose = 0.0;     ///< (2 z_eps + sqrt(2 ln(1/delta))) / sqrt(T)
  double improved = 0.0;  ///< (z_eps + z_delta) / sqrt(T)
};

struct HorizonReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double horizon_T = 0.0;
  double z_epsilon = 0.0;
  double z_delta = 0.0;
  Thresholds thresholds;
  double disc_norm = 0.0;
  double p_outperform = 0.0;
  Verdict verdict = Verdict::kScapmApproxHolds;
};

/// P(K_T / S^0_T > 1/delta) when log K_T - log S^0_T ~ N(v/2, v) with
/// v = disc_norm^2 T. delta = 1 is admitted; at disc_norm = 0 the result is
/// 0 for delta < 1 and 1/2 for delta = 1.
double outperformance_probability(double disc_norm, double horizon_T, double delta);

Thresholds detection_thresholds(double epsilon, double delta, double horizon_T);

/// The verdict is kOutperformsWhp iff disc_norm >= threshold_weak (ties
/// included), which is the same event as p_outperform >= 1 - epsilon.
HorizonReport horizon_report(double disc_norm, double epsilon, double delta, double horizon_T);
HorizonReport horizon_report(const MarketSpec& spec, double epsilon, double delta,
                             double horizon_T);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Two-sided Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double level);

struct McOutperformance {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double probability = 0.0;
  Interval ci99;
};

/// Fraction of paths with log K_T - log S^0_T > ln(1/delta) plus a 99%
/// Wilson interval. Paths are streamed; only terminal values are kept.
McOutperformance monte_carlo_outperformance(const MarketSpec& spec, const SimulationConfig& cfg,
                                            double delta, unsigned threads = 0);

struct RatioSummary {
  double t = 0.0;
  double scaled_time = 0.0;  ///< disc_norm^2 * t
  double mean = 0.0;
  double sd = 0.0;
  double standard_error = 0.0;
  double expected_sd = 0.0;  ///< 1 / sqrt(disc_norm^2 t)
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

/// Distribution of (log K_t - log S^0_t) / (disc_norm^2 t) at each
/// checkpoint, which must be grid times. Throws DomainError when the
/// discrepancy is zero, since the integrated discrepancy then stays finite.
std::vector<RatioSummary> asymptotic_ratio_experiment(const MarketSpec& spec,
                                                      const SimulationConfig& cfg,
                                                      const std::vector<double>& checkpoints,
                                                      unsigned threads = 0);

}  // namespace scapm
