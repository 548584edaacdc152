#pragma once

#include "scapm/market_model.hpp"
#include "scapm/simulation.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace scapm::cli {

enum class ConfigErrc {
  kSyntax,
  kMissingField,
  kDimensionMismatch,
  kNonFinite,
  kRankDeficient,
  kInvalidValue,
};

std::string_view to_string(ConfigErrc code);

class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(ConfigErrc code, std::string field, const std::string& message);

  ConfigErrc code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ConfigErrc code_;
  std::string field_;
};

/// A single market, or a schedule of markets when `is_schedule` is set.
struct MarketConfig {
  bool is_schedule = false;
  Schedule schedule;

  const MarketSpec& market() const { return schedule.front().market; }
  double total_duration() const;
};

/// JSON market description:
///   {"r": 0.02, "mu": [...], "sigma": [[...], ...], "labels": [...]}
/// or {"schedule": [{"duration": 5, "r": ..., "mu": ..., "sigma": ...}, ...]}.
/// Numbers may be written as decimal strings.
MarketConfig parse_market_config(std::string_view text);

MarketConfig load_market_config(const std::string& path);

/// Canonical JSON; parse_market_config(serialize_market_config(c)) == c.
std::string serialize_market_config(const MarketConfig& config);

}  // namespace scapm::cli
