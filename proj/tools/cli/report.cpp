#include "cli/report.hpp"

#include "cli/io.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#ifndef SCAPM_VERSION
#define SCAPM_VERSION "0.0.0"
#endif

namespace scapm::cli {

using nlohmann::ordered_json;

std::string_view tool_version() { return SCAPM_VERSION; }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

ordered_json to_json(const RunManifest& m, bool include_wall_clock) {
  ordered_json j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.seed;
  if (m.simulation) {
    j["simulation"] = {{"horizon_T", m.simulation->horizon_T},
                       {"n_steps", m.simulation->n_steps},
                       {"n_paths", m.simulation->n_paths},
                       {"seed", m.simulation->seed}};
  }
  if (include_wall_clock) {
    j["threads"] = m.threads;
    j["started_at"] = m.started_at;
    j["elapsed_seconds"] = m.elapsed_seconds;
  }
  return j;
}

ordered_json to_json(const MarketSpec& spec, const RiskProfile& p) {
  ordered_json j;
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < spec.num_securities(); ++k) labels.push_back(spec.label(k));
  j["labels"] = labels;
  j["theta"] = to_vec(p.theta);
  j["disc"] = to_vec(p.disc);
  j["disc_norm_sq"] = p.disc_norm_sq;
  j["disc_norm"] = p.disc_norm();
  j["scapm_residuals"] = to_vec(p.scapm_residuals);
  j["deficits"] = to_vec(p.deficits);
  j["optimal_growth_rate"] = p.optimal_growth_rate;
  j["equity_premium"] = spec.mu(0) - spec.r;
  j["index_variance"] = spec.sigma.row(0).squaredNorm();
  j["condition_number"] = p.condition_number;
  j["scapm_holds"] = p.scapm_holds();
  return j;
}

ordered_json to_json(const HorizonReport& r) {
  ordered_json j;
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["horizon_T"] = r.horizon_T;
  j["z_epsilon"] = r.z_epsilon;
  j["z_delta"] = r.z_delta;
  j["threshold_weak"] = r.thresholds.weak;
  j["threshold_loose"] = r.thresholds.loose;
  j["threshold_improved"] = r.thresholds.improved;
  j["disc_norm"] = r.disc_norm;
  j["p_outperform"] = r.p_outperform;
  j["verdict"] = std::string(to_string(r.verdict));
  return j;
}

std::string csv_manifest_header(const RunManifest& m) {
  std::ostringstream os;
  os << "# command=" << m.command << "\n";
  os << "# config=" << m.config_path << "\n";
  os << "# tool_version=" << m.tool_version << "\n";
  os << "# seed=" << m.seed << "\n";
  if (m.simulation) {
    os << "# horizon_T=" << format_double(m.simulation->horizon_T) << "\n";
    os << "# n_steps=" << m.simulation->n_steps << "\n";
    os << "# n_paths=" << m.simulation->n_paths << "\n";
  }
  return os.str();
}

}  // namespace scapm::cli
