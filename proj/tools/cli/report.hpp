#pragma once

#include "scapm/horizon.hpp"
#include "scapm/market_model.hpp"
#include "scapm/simulation.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scapm::cli {

std::string_view tool_version();

struct RunManifest {
  std::string command;
  std::string config_path;
  std::optional<SimulationConfig> simulation;
  std::string tool_version{scapm::cli::tool_version()};
  std::uint64_t seed = 0;
  unsigned threads = 0;
  // Wall-clock metadata; excluded from deterministic payloads.
  std::string started_at;
  double elapsed_seconds = 0.0;
};

/// UTC timestamp, ISO 8601.
std::string utc_now();

nlohmann::ordered_json to_json(const RunManifest& m, bool include_wall_clock);
nlohmann::ordered_json to_json(const MarketSpec& spec, const RiskProfile& profile);
nlohmann::ordered_json to_json(const HorizonReport& report);

/// "# key=value" header lines for CSV payloads (no wall-clock fields).
std::string csv_manifest_header(const RunManifest& m);

}  // namespace scapm::cli
