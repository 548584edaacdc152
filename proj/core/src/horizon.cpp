#include "scapm/horizon.hpp"

#include "scapm/error.hpp"
#include "scapm/normal.hpp"
#include "scapm/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scapm {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kOutperformsWhp:
      return "OUTPERFORMS_WHP";
    case Verdict::kScapmApproxHolds:
      return "SCAPM_APPROX_HOLDS";
  }
  return "UNKNOWN";
}

double outperformance_probability(double disc_norm, double horizon_T, double delta) {
  if (!(disc_norm >= 0.0) || !std::isfinite(disc_norm)) {
    throw DomainError("disc_norm must be a finite non-negative number");
  }
  if (!(horizon_T > 0.0)) throw DomainError("horizon must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  if (disc_norm == 0.0) return delta < 1.0 ? 0.0 : 0.5;
  const double log_factor = -std::log(delta);
  const double x = disc_norm * std::sqrt(horizon_T);
  return normal_cdf(0.5 * x - log_factor / x);
}

namespace {

void check_eps_delta(double epsilon, double delta, double horizon_T) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(horizon_T > 0.0) || !std::isfinite(horizon_T)) throw DomainError("horizon must be positive");
}

}  // namespace

Thresholds detection_thresholds(double epsilon, double delta, double horizon_T) {
  check_eps_delta(epsilon, delta, horizon_T);
  const double z_eps = upper_normal_quantile(epsilon);
  const double z_delta = upper_normal_quantile(delta);
  const double two_log = 2.0 * -std::log(delta);
  const double root_T = std::sqrt(horizon_T);
  Thresholds t;
  t.weak = (z_eps + std::sqrt(z_eps * z_eps + two_log)) / root_T;
  t.loose = (2.0 * z_eps + std::sqrt(two_log)) / root_T;
  t.improved = (z_eps + z_delta) / root_T;
  return t;
}

HorizonReport horizon_report(double disc_norm, double epsilon, double delta, double horizon_T) {
  HorizonReport rep;
  rep.epsilon = epsilon;
  rep.delta = delta;
  rep.horizon_T = horizon_T;
  rep.thresholds = detection_thresholds(epsilon, delta, horizon_T);
  rep.z_epsilon = upper_normal_quantile(epsilon);
  rep.z_delta = upper_normal_quantile(delta);
  rep.disc_norm = disc_norm;
  rep.p_outperform = outperformance_probability(disc_norm, horizon_T, delta);
  rep.verdict = disc_norm >= rep.thresholds.weak ? Verdict::kOutperformsWhp
                                                 : Verdict::kScapmApproxHolds;
  return rep;
}

HorizonReport horizon_report(const MarketSpec& spec, double epsilon, double delta,
                             double horizon_T) {
  return horizon_report(risk_profile(spec).disc_norm(), epsilon, delta, horizon_T);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) throw DomainError("wilson_interval needs at least one trial");
  if (successes > trials) throw DomainError("more successes than trials");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const double z = inverse_normal_cdf(0.5 + 0.5 * level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

McOutperformance monte_carlo_outperformance(const MarketSpec& spec, const SimulationConfig& cfg,
                                            double delta, unsigned threads) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  const WealthModel model(spec, cfg);
  const double log_factor = -std::log(delta);
  const auto A = static_cast<std::size_t>(spec.num_securities());
  const std::size_t n = cfg.n_steps;
  std::vector<char> hit(cfg.n_paths, 0);
  simulate_with_wealth(model, cfg, threads,
                       [&](std::size_t p, std::span<const double>, std::span<const double> log_S,
                           std::span<const double> log_K) {
                         hit[p] = (log_K[n] - log_S[n * A]) > log_factor ? 1 : 0;
                       });
  McOutperformance out;
  out.trials = cfg.n_paths;
  out.successes = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), char{1}));
  out.probability = static_cast<double>(out.successes) / static_cast<double>(out.trials);
  out.ci99 = wilson_interval(out.successes, out.trials, 0.99);
  return out;
}

namespace {

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::vector<double>& xs, double q) {
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.end());
  const double a = xs[lo];
  if (lo + 1 >= xs.size()) return a;
  const double b = *std::min_element(xs.begin() + static_cast<std::ptrdiff_t>(lo) + 1, xs.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

}  // namespace

std::vector<RatioSummary> asymptotic_ratio_experiment(const MarketSpec& spec,
                                                      const SimulationConfig& cfg,
                                                      const std::vector<double>& checkpoints,
                                                      unsigned threads) {
  const WealthModel model(spec, cfg);
  const double disc_sq = model.profile(0).disc_norm_sq;
  if (disc_sq == 0.0) {
    throw DomainError(
        "zero discrepancy: the integrated squared discrepancy stays finite, so the rate "
        "statement has no content");
  }
  std::vector<std::size_t> idx;
  for (double t : checkpoints) {
    if (!(t > 0.0)) throw DomainError("checkpoints must be positive times");
    idx.push_back(grid_index(cfg, t));
  }

  const std::size_t C = idx.size();
  const auto A = static_cast<std::size_t>(spec.num_securities());
  std::vector<double> ratios(cfg.n_paths * C);
  simulate_with_wealth(model, cfg, threads,
                       [&](std::size_t p, std::span<const double>, std::span<const double> log_S,
                           std::span<const double> log_K) {
                         for (std::size_t c = 0; c < C; ++c) {
                           const std::size_t i = idx[c];
                           const double scaled = disc_sq * cfg.time_at(i);
                           ratios[p * C + c] = (log_K[i] - log_S[i * A]) / scaled;
                         }
                       });

  std::vector<RatioSummary> out;
  const double n = static_cast<double>(cfg.n_paths);
  std::vector<double> column(cfg.n_paths);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t p = 0; p < cfg.n_paths; ++p) column[p] = ratios[p * C + c];
    RatioSummary s;
    s.t = cfg.time_at(idx[c]);
    s.scaled_time = disc_sq * s.t;
    s.mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : column) ss += (x - s.mean) * (x - s.mean);
    s.sd = cfg.n_paths > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.standard_error = s.sd / std::sqrt(n);
    s.expected_sd = 1.0 / std::sqrt(s.scaled_time);
    s.q05 = quantile(column, 0.05);
    s.q50 = quantile(column, 0.50);
    s.q95 = quantile(column, 0.95);
    out.push_back(s);
  }
  return out;
}

}  // namespace scapm
