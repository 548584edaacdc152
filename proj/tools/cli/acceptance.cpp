#include "cli/acceptance.hpp"

#include "cli/io.hpp"
#include "scapm/error.hpp"
#include "scapm/horizon.hpp"
#include "scapm/normal.hpp"
#include "scapm/rng.hpp"
#include "scapm/strategy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace scapm::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

CriterionResult make(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

void finish(CriterionResult& r, bool ok, const std::ostringstream& detail, Clock::time_point t0) {
  r.status = ok ? CriterionStatus::kPass : CriterionStatus::kFail;
  r.detail = detail.str();
  r.seconds = since(t0);
}

// Random viable market: K <= 8, D_b <= K+1, mu = r1 + sigma theta.
MarketSpec random_viable_market(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> k_dist(0, 8);
  std::normal_distribution<double> vol(0.0, 0.2);
  std::normal_distribution<double> risk(0.0, 0.3);
  std::uniform_real_distribution<double> rate(0.0, 0.05);
  for (;;) {
    const int K = k_dist(gen);
    std::uniform_int_distribution<int> d_dist(1, K + 1);
    const int D = d_dist(gen);
    MarketSpec spec;
    spec.r = rate(gen);
    spec.sigma.resize(K + 1, D);
    for (int i = 0; i <= K; ++i)
      for (int d = 0; d < D; ++d) spec.sigma(i, d) = vol(gen);
    Eigen::VectorXd theta(D);
    for (int d = 0; d < D; ++d) theta(d) = risk(gen);
    spec.mu = Eigen::VectorXd::Constant(K + 1, spec.r) + spec.sigma * theta;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.sigma);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) > 1e-3 * s(0)) return spec;
  }
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) { return mix64(seed ^ mix64(salt + 1)); }

}  // namespace

std::string format_result(const CriterionResult& r) {
  const char* tag = r.status == CriterionStatus::kPass   ? "PASS"
                    : r.status == CriterionStatus::kSkip ? "SKIP"
                                                         : "FAIL";
  std::ostringstream os;
  os << "[" << tag << "] " << r.id << ". " << r.name << " -- " << r.detail << " ("
     << fmt("%.2f", r.seconds) << " s)";
  return os.str();
}

MarketSpec running_example() {
  MarketSpec spec;
  spec.r = 0.02;
  spec.mu.resize(2);
  spec.mu << 0.08, 0.05;
  spec.sigma.resize(2, 2);
  spec.sigma << 0.2, 0.0, 0.1, 0.3;
  spec.labels = {"index", "stock"};
  return spec;
}

MarketSpec scapm_market(const MarketSpec& base) {
  return market_with_discrepancy(base, Eigen::VectorXd::Zero(base.brownian_dim()));
}

MarketSpec market_with_discrepancy(const MarketSpec& base, const Eigen::VectorXd& disc) {
  MarketSpec spec = base;
  const Eigen::VectorXd theta = base.sigma.row(0).transpose() + disc;
  spec.mu = Eigen::VectorXd::Constant(base.num_securities(), base.r) + base.sigma * theta;
  return spec;
}

CriterionResult check_central_identity(std::size_t n_specs, std::size_t paths, std::size_t steps,
                                       const MarketConfig& config, std::uint64_t seed,
                                       unsigned threads) {
  auto res = make(1, "central identity");
  const auto t0 = Clock::now();
  std::mt19937_64 gen(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < n_specs; ++s) {
    const MarketSpec spec = random_viable_market(gen);
    const SimulationConfig cfg{10.0, steps, paths, sub_seed(seed, s)};
    const WealthModel model(spec, cfg);
    std::vector<double> per_path(paths, 0.0);
    simulate_with_wealth(model, cfg, threads,
                         [&](std::size_t p, std::span<const double> dW,
                             std::span<const double> log_S, std::span<const double> log_K) {
                           per_path[p] = max_identity_residual(model, dW, log_S, log_K);
                         });
    worst = std::max(worst, *std::max_element(per_path.begin(), per_path.end()));
  }
  const double elapsed = since(t0);

  // The configured market or schedule itself.
  double worst_config = 0.0;
  std::string config_note;
  {
    Schedule schedule = config.schedule;
    const double horizon = config.is_schedule ? config.total_duration() : 10.0;
    if (!config.is_schedule) schedule.front().duration = horizon;
    const SimulationConfig cfg{horizon, steps, paths, sub_seed(seed, 1000)};
    try {
      const WealthModel model(schedule, cfg);
      std::vector<double> per_path(paths, 0.0);
      simulate_with_wealth(model, cfg, threads,
                           [&](std::size_t p, std::span<const double> dW,
                               std::span<const double> log_S, std::span<const double> log_K) {
                             per_path[p] = max_identity_residual(model, dW, log_S, log_K);
                           });
      worst_config = *std::max_element(per_path.begin(), per_path.end());
    } catch (const ConfigError& e) {
      config_note = std::string(" [configured schedule not checked: ") + e.what() + "]";
    }
  }

  std::ostringstream d;
  d << n_specs << " random specs x " << paths << " paths x " << steps
    << " steps: max |residual| = " << fmt("%.3e", worst)
    << "; configured market: " << fmt("%.3e", worst_config) << config_note << " (tol 1e-9, budget 10 s, took "
    << fmt("%.2f", elapsed) << " s)";
  finish(res, worst <= 1e-9 && worst_config <= 1e-9 && elapsed < 10.0, d, t0);
  return res;
}

CriterionResult check_asymptotic_rate(const MarketSpec& spec, std::size_t paths,
                                      std::uint64_t seed, unsigned threads) {
  auto res = make(2, "asymptotic rate 1/2");
  const auto t0 = Clock::now();
  const RiskProfile profile = risk_profile(spec);
  if (profile.disc_norm_sq == 0.0) {
    res.status = CriterionStatus::kSkip;
    res.detail = "discrepancy is zero: SCAPM holds and the rate statement is vacuous";
    return res;
  }
  const double ds = profile.disc_norm_sq;
  // Exact scheme: a coarse grid with the checkpoints on it loses nothing.
  const SimulationConfig cfg{1000.0 / ds, 100, paths, seed};
  const std::vector<double> checkpoints{10.0 / ds, 100.0 / ds, 1000.0 / ds};
  const auto summary = asymptotic_ratio_experiment(spec, cfg, checkpoints, threads);
  const double elapsed = since(t0);

  bool ok = elapsed < 120.0;
  std::ostringstream d;
  for (const auto& s : summary) {
    const double se = 1.0 / std::sqrt(s.scaled_time * static_cast<double>(paths));
    const double z = (s.mean - 0.5) / se;
    const double sd_rel = s.sd / s.expected_sd - 1.0;
    const bool pass = std::abs(z) <= 4.0 && std::abs(sd_rel) <= 0.10;
    ok = ok && pass;
    d << "V=" << fmt("%g", s.scaled_time) << ": mean " << fmt("%.5f", s.mean) << " (" << fmt("%+.2f", z)
      << " SE), sd " << fmt("%.5f", s.sd) << " vs " << fmt("%.5f", s.expected_sd) << " ("
      << fmt("%+.1f", 100.0 * sd_rel) << "%); ";
  }
  d << paths << " paths";
  finish(res, ok, d, t0);
  return res;
}

CriterionResult check_finite_horizon_dichotomy(std::size_t paths, std::uint64_t seed,
                                               unsigned threads) {
  auto res = make(3, "finite-horizon dichotomy");
  const auto t0 = Clock::now();
  const double grid[] = {0.5, 0.1, 0.025};
  const double horizons[] = {25.0, 100.0, 400.0};
  const MarketSpec base = running_example();

  bool ok = true;
  double worst_closed = 0.0;
  int mc_fail = 0;
  std::ostringstream fails;
  std::uint64_t combo = 0;
  for (double eps : grid) {
    for (double delta : grid) {
      for (double T : horizons) {
        const double thr = detection_thresholds(eps, delta, T).weak;
        const double closed = outperformance_probability(thr, T, delta);
        worst_closed = std::max(worst_closed, std::abs(closed - (1.0 - eps)));

        Eigen::VectorXd disc = Eigen::VectorXd::Zero(2);
        disc(0) = thr;
        const MarketSpec spec = market_with_discrepancy(base, disc);
        const SimulationConfig cfg{T, 1, paths, sub_seed(seed, 100 + combo++)};
        const auto mc = monte_carlo_outperformance(spec, cfg, delta, threads);
        if (!mc.ci99.contains(1.0 - eps)) {
          ++mc_fail;
          fails << " [eps=" << eps << " delta=" << delta << " T=" << T << ": p_hat="
                << fmt("%.5f", mc.probability) << " CI=(" << fmt("%.5f", mc.ci99.lo) << ", "
                << fmt("%.5f", mc.ci99.hi) << ")]";
        }
      }
    }
  }
  const double elapsed = since(t0);
  ok = worst_closed <= 1e-9 && mc_fail == 0 && elapsed < 120.0;
  std::ostringstream d;
  d << "27 (eps, delta, T) cells: max |P_closed - (1-eps)| = " << fmt("%.2e", worst_closed)
    << "; MC (" << paths << " paths) outside 99% CI: " << mc_fail << fails.str();
  finish(res, ok, d, t0);
  return res;
}

CriterionResult check_threshold_arithmetic() {
  auto res = make(4, "threshold arithmetic");
  const auto t0 = Clock::now();
  const double weak = detection_thresholds(0.5, 0.5, 100.0).weak;
  const double improved = detection_thresholds(0.025, 0.025, 400.0).improved;
  const bool ok = std::abs(weak - 0.1177410) <= 1e-6 && std::abs(improved - 0.1959964) <= 1e-6;
  std::ostringstream d;
  d << "weak(0.5, 0.5, 100) = " << fmt("%.7f", weak) << " (want 0.1177410), improved(0.025, 0.025, 400) = "
    << fmt("%.7f", improved) << " (want 0.1959964), tol 1e-6";
  finish(res, ok, d, t0);
  return res;
}

CriterionResult check_scapm_fixed_point(const MarketSpec& base, std::size_t paths,
                                        std::size_t steps, std::uint64_t seed, unsigned threads) {
  auto res = make(5, "SCAPM fixed point");
  const auto t0 = Clock::now();
  const MarketSpec spec = scapm_market(base);
  const RiskProfile profile = risk_profile(spec);
  const double max_resid = profile.scapm_residuals.cwiseAbs().maxCoeff();
  const bool disc_zero = profile.disc.isZero(0.0);

  const SimulationConfig cfg{10.0, steps, paths, seed};
  const WealthModel model(spec, cfg);
  const auto A = static_cast<std::size_t>(spec.num_securities());
  std::vector<char> identical(paths, 0);
  simulate_with_wealth(model, cfg, threads,
                       [&](std::size_t p, std::span<const double>, std::span<const double> log_S,
                           std::span<const double> log_K) {
                         bool same = true;
                         for (std::size_t i = 0; i <= cfg.n_steps; ++i) {
                           same = same && log_K[i] == log_S[i * A];
                         }
                         identical[p] = same ? 1 : 0;
                       });
  const auto n_same = static_cast<std::size_t>(std::count(identical.begin(), identical.end(), char{1}));
  std::ostringstream d;
  d << "disc " << (disc_zero ? "== 0" : "!= 0") << ", max |SCAPM residual| = "
    << fmt("%.2e", max_resid) << " (tol 1e-12), log K == log S^0 bitwise on " << n_same << "/"
    << paths << " paths";
  finish(res, disc_zero && max_resid <= 1e-12 && n_same == paths, d, t0);
  return res;
}

CriterionResult check_growth_identity(const MarketSpec& spec, std::size_t paths, double horizon,
                                      std::uint64_t seed, unsigned threads) {
  auto res = make(6, "growth-rate deficit identity");
  const auto t0 = Clock::now();
  const RiskProfile profile = risk_profile(spec);
  const SimulationConfig cfg{horizon, 1, paths, seed};
  const PriceModel model(Schedule{Segment{horizon, spec}}, cfg);
  const auto A = static_cast<std::size_t>(spec.num_securities());
  std::vector<double> terminal(paths * A);
  simulate_streaming(model, cfg, threads,
                     [&](std::size_t p, std::span<const double>, std::span<const double> log_S) {
                       for (std::size_t k = 0; k < A; ++k) terminal[p * A + k] = log_S[A + k];
                     });
  bool ok = true;
  std::ostringstream d;
  const double n = static_cast<double>(paths);
  for (std::size_t k = 0; k < A; ++k) {
    double sum = 0.0;
    for (std::size_t p = 0; p < paths; ++p) sum += terminal[p * A + k];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t p = 0; p < paths; ++p) ss += std::pow(terminal[p * A + k] - mean, 2);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n) / horizon;
    const double rate = mean / horizon;
    const double expected =
        profile.optimal_growth_rate - profile.deficits(static_cast<Eigen::Index>(k));
    const double z = (rate - expected) / std::max(se, 1e-15);
    ok = ok && std::abs(rate - expected) <= 4.0 * se + 1e-12;
    d << spec.label(static_cast<Eigen::Index>(k)) << ": " << fmt("%.6f", rate) << " vs "
      << fmt("%.6f", expected) << " (" << fmt("%+.2f", z) << " SE); ";
  }
  d << paths << " paths, T=" << horizon;
  finish(res, ok, d, t0);
  return res;
}

CriterionResult check_replication_convergence(const MarketSpec& spec, std::size_t paths,
                                              unsigned coarsest_log2_steps, std::uint64_t seed) {
  auto res = make(7, "replication refinement order");
  const auto t0 = Clock::now();
  const RiskProfile profile = risk_profile(spec);
  const Eigen::VectorXd pi = replication_weights(spec, profile.theta);
  const Eigen::Index D = spec.brownian_dim();
  const std::size_t fine_steps = std::size_t{1} << (coarsest_log2_steps + 2);
  const SimulationConfig fine{1.0, fine_steps, paths, seed};

  // Same Brownian path on every level: coarse increments are pairwise sums.
  double sum[3] = {0.0, 0.0, 0.0};
  std::size_t kept[3] = {0, 0, 0};
  std::size_t censored = 0;
  std::vector<double> level_dW;
  std::vector<double> log_K;
  for (std::size_t p = 0; p < paths; ++p) {
    std::vector<double> dW(fine_steps * static_cast<std::size_t>(D));
    fill_increments(fine, p, D, dW);
    for (int lvl = 2; lvl >= 0; --lvl) {
      const std::size_t n = fine_steps >> lvl;
      const std::size_t group = std::size_t{1} << lvl;
      level_dW.assign(n * static_cast<std::size_t>(D), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < group; ++j)
          for (Eigen::Index d = 0; d < D; ++d)
            level_dW[i * D + d] += dW[(i * group + j) * D + d];
      const SimulationConfig cfg{1.0, n, paths, seed};
      const WealthModel model(spec, cfg);
      log_K.assign(n + 1, 0.0);
      model.propagate(level_dW, log_K);
      const double e = replication_error(spec, pi, cfg.dt(), level_dW, log_K, D);
      if (e < 0.0) {
        ++censored;
        continue;
      }
      sum[lvl] += e;
      ++kept[lvl];
    }
  }
  double err[3];
  for (int l = 0; l < 3; ++l) err[l] = kept[l] ? sum[l] / static_cast<double>(kept[l]) : NAN;
  const double ratio_coarse = err[2] / err[1];
  const double ratio_fine = err[1] / err[0];
  const bool ok = ratio_coarse >= 1.5 && ratio_coarse <= 2.5 && ratio_fine >= 1.5 && ratio_fine <= 2.5;
  std::ostringstream d;
  d << "mean max |log V - log K| at 2^" << coarsest_log2_steps << ", 2^" << coarsest_log2_steps + 1
    << ", 2^" << coarsest_log2_steps + 2 << " steps: " << fmt("%.3e", err[2]) << ", "
    << fmt("%.3e", err[1]) << ", " << fmt("%.3e", err[0]) << "; ratios " << fmt("%.3f", ratio_coarse)
    << ", " << fmt("%.3f", ratio_fine) << " (need [1.5, 2.5]); observed order "
    << fmt("%.2f", std::log2(ratio_coarse * ratio_fine) / 2.0) << "; censored " << censored << "; "
    << paths << " paths";
  finish(res, ok, d, t0);
  return res;
}

CriterionResult check_determinism(const MarketConfig& config, std::uint64_t seed) {
  auto res = make(8, "simulate determinism");
  const auto t0 = Clock::now();
  SimulateOptions opts;
  opts.config_path = "<acceptance>";
  opts.paths = 257;
  opts.steps = 64;
  opts.seed = seed;
  if (!config.is_schedule) opts.horizon = 1.0;
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_path = opts.config_path;
  manifest.seed = seed;
  SimulationConfig cfg{config.is_schedule ? config.total_duration() : 1.0, opts.steps, opts.paths, seed};
  manifest.simulation = cfg;

  auto run = [&](unsigned threads) {
    std::ostringstream csv;
    SimulateOptions o = opts;
    o.threads = threads;
    write_simulation(config, o, manifest, csv, nullptr);
    return csv.str();
  };
  std::string single;
  std::string again;
  std::string many;
  std::ostringstream d;
  try {
    single = run(1);
    again = run(1);
    many = run(8);
  } catch (const ConfigError& e) {
    d << "could not simulate the configured market: " << e.what();
    finish(res, false, d, t0);
    return res;
  }
  const bool ok = !single.empty() && single == again && single == many;
  d << "two runs with 1 thread and one with 8 threads: " << single.size() << " bytes, "
    << (ok ? "byte-identical" : "DIFFERENT");
  finish(res, ok, d, t0);
  return res;
}

std::vector<double> quantile_grid() {
  std::vector<double> ps;
  const int n = 200;
  const double lo = std::log(1e-6);
  const double hi = std::log(0.5);
  for (int i = 0; i < n; ++i) {
    const double p = std::exp(lo + (hi - lo) * i / (n - 1));
    ps.push_back(p);
    ps.push_back(1.0 - p);
  }
  return ps;
}

CriterionResult check_quantile_quality() {
  auto res = make(9, "quantile quality");
  const auto t0 = Clock::now();
  double worst = 0.0;
  double worst_p = 0.0;
  const auto grid = quantile_grid();
  for (double p : grid) {
    const double e = std::abs(normal_cdf(inverse_normal_cdf(p)) - p);
    if (e > worst) {
      worst = e;
      worst_p = p;
    }
  }
  std::ostringstream d;
  d << grid.size() << " grid points in [1e-6, 1-1e-6]: max |Phi(q(p)) - p| = " << fmt("%.2e", worst)
    << " at p=" << fmt("%.6g", worst_p) << " (tol 1e-9)";
  finish(res, worst <= 1e-9, d, t0);
  return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceContext& ctx) {
  const bool full = ctx.level == VerifyLevel::kFull;
  const MarketSpec& market = ctx.config.market();
  const std::uint64_t s = ctx.seed;
  std::vector<CriterionResult> out;
  out.push_back(check_central_identity(full ? 100 : 20, 100, 1000, ctx.config, sub_seed(s, 1), ctx.threads));
  out.push_back(check_asymptotic_rate(market, full ? 10'000 : 2'000, sub_seed(s, 2), ctx.threads));
  out.push_back(check_finite_horizon_dichotomy(full ? 100'000 : 20'000, sub_seed(s, 3), ctx.threads));
  out.push_back(check_threshold_arithmetic());
  out.push_back(check_scapm_fixed_point(market, full ? 1000 : 200, 100, sub_seed(s, 5), ctx.threads));
  out.push_back(check_growth_identity(market, full ? 100'000 : 20'000, 10.0, sub_seed(s, 6), ctx.threads));
  out.push_back(check_replication_convergence(market, 100, full ? 12 : 10, sub_seed(s, 7)));
  out.push_back(check_determinism(ctx.config, sub_seed(s, 8)));
  out.push_back(check_quantile_quality());
  return out;
}

}  // namespace scapm::cli
