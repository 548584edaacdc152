#include "cli/commands.hpp"

#include "cli/acceptance.hpp"
#include "cli/io.hpp"
#include "scapm/error.hpp"
#include "scapm/strategy.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace scapm::cli {

using nlohmann::ordered_json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCAPM_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return 1;
}

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigParseError& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NonViableMarket& e) {
    err << "error [non_viable]: " << e.what() << "\n";
    return kExitNonViable;
  } catch (const IoError& e) {
    err << "error [io]: " << e.what() << "\n";
    return kExitIo;
  } catch (const StructuralError& e) {
    err << "error [structural]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    err << "error [config]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error [domain]: " << e.what() << "\n";
    return kExitValidation;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const std::string& payload, const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    write_file(*path, payload);
  } else {
    out << payload;
  }
}

}  // namespace

int run_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.command = "analyze";
    manifest.config_path = opts.config_path;
    manifest.started_at = utc_now();

    const MarketConfig config = load_market_config(opts.config_path);

    ordered_json segments = ordered_json::array();
    double disc_integral = 0.0;
    for (const auto& seg : config.schedule) {
      const auto viability = check_viability(seg.market);
      const RiskProfile profile = risk_profile(seg.market);
      ordered_json j;
      if (config.is_schedule) j["duration"] = seg.duration;
      j["viability_residual"] = viability.residual;
      j["risk_profile"] = to_json(seg.market, profile);
      segments.push_back(std::move(j));
      disc_integral += seg.duration * profile.disc_norm_sq;
    }

    std::vector<double> horizons = opts.horizons;
    double disc_norm = 0.0;
    if (config.is_schedule) {
      // Deterministic schedule: log K_T - log S^0_T ~ N(V/2, V) with V the
      // integrated squared discrepancy, i.e. a constant market with the
      // time-averaged ||disc||^2.
      const double total = config.total_duration();
      for (double h : horizons) {
        if (std::abs(h - total) > 1e-9 * total) {
          throw ConfigError("for a schedule the horizon must equal the total duration");
        }
      }
      horizons = {total};
      disc_norm = std::sqrt(disc_integral / total);
    } else {
      if (horizons.empty()) horizons = {100.0};
      disc_norm = risk_profile(config.market()).disc_norm();
    }

    ordered_json reports = ordered_json::array();
    for (double T : horizons) {
      for (double eps : opts.epsilons) {
        for (double delta : opts.deltas) {
          reports.push_back(to_json(horizon_report(disc_norm, eps, delta, T)));
        }
      }
    }

    manifest.elapsed_seconds = seconds_since(t0);
    ordered_json doc;
    doc["manifest"] = to_json(manifest, true);
    doc["kind"] = config.is_schedule ? "schedule" : "market";
    doc["segments"] = std::move(segments);
    doc["horizon_reports"] = std::move(reports);
    emit(doc.dump(2) + "\n", opts.out, out);
    return int{kExitOk};
  });
}

SimulationSummary write_simulation(const MarketConfig& config, const SimulateOptions& opts,
                                   const RunManifest& manifest, std::ostream& csv,
                                   std::ostream* full) {
  SimulationConfig cfg;
  cfg.n_paths = opts.paths;
  cfg.n_steps = opts.steps;
  cfg.seed = opts.seed;
  Schedule schedule = config.schedule;
  if (config.is_schedule) {
    const double total = config.total_duration();
    if (opts.horizon && std::abs(*opts.horizon - total) > 1e-9 * total) {
      throw ConfigError("for a schedule the horizon must equal the total duration");
    }
    cfg.horizon_T = total;
  } else {
    if (!opts.horizon) throw ConfigError("--horizon is required for a single market");
    cfg.horizon_T = *opts.horizon;
    schedule.front().duration = cfg.horizon_T;
  }
  cfg.validate();
  if (full != nullptr && cfg.n_paths * (cfg.n_steps + 1) > opts.max_full_rows) {
    std::ostringstream os;
    os << "full-path output would have " << cfg.n_paths * (cfg.n_steps + 1)
       << " rows, above the cap of " << opts.max_full_rows;
    throw ConfigError(os.str());
  }

  const WealthModel model(schedule, cfg);
  const auto A = static_cast<std::size_t>(model.prices().num_securities());
  const std::size_t n = cfg.n_steps;
  const std::size_t width = A + 2;
  std::vector<double> rows(cfg.n_paths * width);
  std::vector<std::string> full_rows(full != nullptr ? cfg.n_paths : 0);
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = cfg.time_at(i);

  simulate_with_wealth(model, cfg, opts.threads,
                       [&](std::size_t p, std::span<const double> dW,
                           std::span<const double> log_S, std::span<const double> log_K) {
                         double* row = rows.data() + p * width;
                         for (std::size_t k = 0; k < A; ++k) row[k] = log_S[n * A + k];
                         row[A] = log_K[n];
                         row[A + 1] = max_identity_residual(model, dW, log_S, log_K);
                         if (full != nullptr) {
                           std::string& s = full_rows[p];
                           for (std::size_t i = 0; i <= n; ++i) {
                             s += std::to_string(p);
                             s += ',';
                             s += std::to_string(i);
                             s += ',';
                             s += format_double(times[i]);
                             for (std::size_t k = 0; k < A; ++k) {
                               s += ',';
                               s += format_double(log_S[i * A + k]);
                             }
                             s += ',';
                             s += format_double(log_K[i]);
                             s += '\n';
                           }
                         }
                       });

  const auto& first = schedule.front().market;
  std::string header = "path_id";
  for (std::size_t k = 0; k < A; ++k) header += ",log_S_" + first.label(static_cast<Eigen::Index>(k));
  header += ",log_K,identity_residual\n";

  csv << csv_manifest_header(manifest) << header;
  SimulationSummary summary;
  summary.n_paths = cfg.n_paths;
  summary.integrated_disc_sq = model.integrated_disc_sq(n);
  double excess_sum = 0.0;
  std::string line;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    const double* row = rows.data() + p * width;
    line = std::to_string(p);
    for (std::size_t c = 0; c < width; ++c) {
      line += ',';
      line += format_double(row[c]);
    }
    line += '\n';
    csv << line;
    summary.max_identity_residual = std::max(summary.max_identity_residual, row[A + 1]);
    excess_sum += row[A] - row[0];
  }
  summary.mean_excess_log_wealth = excess_sum / static_cast<double>(cfg.n_paths);

  if (full != nullptr) {
    *full << csv_manifest_header(manifest) << "path_id,step,t";
    for (std::size_t k = 0; k < A; ++k) *full << ",log_S_" << first.label(static_cast<Eigen::Index>(k));
    *full << ",log_K\n";
    for (const auto& s : full_rows) *full << s;
  }
  return summary;
}

int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const MarketConfig config = load_market_config(opts.config_path);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.config_path = opts.config_path;
    manifest.seed = opts.seed;
    manifest.threads = resolve_threads(opts.threads);
    manifest.started_at = utc_now();
    SimulationConfig cfg;
    cfg.n_paths = opts.paths;
    cfg.n_steps = opts.steps;
    cfg.seed = opts.seed;
    cfg.horizon_T = config.is_schedule ? config.total_duration() : opts.horizon.value_or(0.0);
    manifest.simulation = cfg;

    std::ostringstream csv;
    std::ostringstream full;
    const SimulationSummary summary =
        write_simulation(config, opts, manifest, csv, opts.full_paths ? &full : nullptr);

    std::ostream& summary_out = opts.out ? out : err;
    if (opts.out) {
      write_file(*opts.out, csv.str());
    } else {
      out << csv.str();
    }
    if (opts.full_paths) write_file(*opts.full_paths, full.str());

    manifest.elapsed_seconds = seconds_since(t0);
    ordered_json doc;
    doc["manifest"] = to_json(manifest, true);
    doc["n_paths"] = summary.n_paths;
    doc["max_identity_residual"] = summary.max_identity_residual;
    doc["mean_excess_log_wealth"] = summary.mean_excess_log_wealth;
    doc["expected_excess_log_wealth"] = 0.5 * summary.integrated_disc_sq;
    doc["integrated_disc_sq"] = summary.integrated_disc_sq;
    summary_out << doc.dump(2) << "\n";
    return int{kExitOk};
  });
}

int run_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MarketConfig config = load_market_config(opts.config_path);
    AcceptanceContext ctx;
    ctx.config = config;
    ctx.level = opts.level;
    ctx.threads = opts.threads;
    ctx.seed = opts.seed;
    const auto results = run_acceptance(ctx);
    std::size_t failed = 0;
    for (const auto& r : results) {
      out << format_result(r) << "\n";
      if (r.status == CriterionStatus::kFail) ++failed;
    }
    out << (failed == 0 ? "ALL PASSED" : std::to_string(failed) + " FAILED") << " ("
        << results.size() << " criteria, level "
        << (opts.level == VerifyLevel::kFull ? "full" : "quick") << ")\n";
    return failed == 0 ? int{kExitOk} : int{kExitAcceptance};
  });
}

}  // namespace scapm::cli
