#include "cli/config.hpp"

#include "cli/io.hpp"
#include "scapm/error.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace scapm::cli {

using nlohmann::json;

std::string_view to_string(ConfigErrc code) {
  switch (code) {
    case ConfigErrc::kSyntax:
      return "syntax";
    case ConfigErrc::kMissingField:
      return "missing_field";
    case ConfigErrc::kDimensionMismatch:
      return "dimension_mismatch";
    case ConfigErrc::kNonFinite:
      return "non_finite";
    case ConfigErrc::kRankDeficient:
      return "rank_deficient";
    case ConfigErrc::kInvalidValue:
      return "invalid_value";
  }
  return "unknown";
}

ConfigParseError::ConfigParseError(ConfigErrc code, std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      code_(code),
      field_(std::move(field)) {}

double MarketConfig::total_duration() const {
  double t = 0.0;
  for (const auto& s : schedule) t += s.duration;
  return t;
}

namespace {

double number_at(const json& j, const std::string& field) {
  double v = 0.0;
  if (j.is_number()) {
    v = j.get<double>();
  } else if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw ConfigParseError(ConfigErrc::kInvalidValue, field, "'" + s + "' is not a number");
    }
  } else {
    throw ConfigParseError(ConfigErrc::kInvalidValue, field, "expected a number");
  }
  if (!std::isfinite(v)) throw ConfigParseError(ConfigErrc::kNonFinite, field, "value is not finite");
  return v;
}

const json& require(const json& obj, const char* key, const std::string& prefix) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigParseError(ConfigErrc::kMissingField, prefix + key, "required field is missing");
  }
  return *it;
}

MarketSpec parse_market(const json& obj, const std::string& prefix) {
  if (!obj.is_object()) throw ConfigParseError(ConfigErrc::kSyntax, prefix, "expected an object");
  MarketSpec spec;
  spec.r = number_at(require(obj, "r", prefix), prefix + "r");

  const json& sigma = require(obj, "sigma", prefix);
  if (!sigma.is_array() || sigma.empty()) {
    throw ConfigParseError(ConfigErrc::kInvalidValue, prefix + "sigma",
                           "expected a non-empty array of rows");
  }
  const std::size_t rows = sigma.size();
  std::size_t cols = 0;
  for (std::size_t k = 0; k < rows; ++k) {
    const std::string field = prefix + "sigma[" + std::to_string(k) + "]";
    const json& row = sigma[k];
    if (!row.is_array() || row.empty()) {
      throw ConfigParseError(ConfigErrc::kInvalidValue, field, "expected a non-empty array");
    }
    if (k == 0) {
      cols = row.size();
      spec.sigma.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      std::ostringstream os;
      os << "row has " << row.size() << " entries, expected D_b = " << cols;
      throw ConfigParseError(ConfigErrc::kDimensionMismatch, field, os.str());
    }
    for (std::size_t d = 0; d < cols; ++d) {
      spec.sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)) =
          number_at(row[d], field + "[" + std::to_string(d) + "]");
    }
  }
  if (cols > rows) {
    std::ostringstream os;
    os << "Brownian dimension " << cols << " exceeds the number of securities " << rows;
    throw ConfigParseError(ConfigErrc::kDimensionMismatch, prefix + "sigma", os.str());
  }

  const json& mu = require(obj, "mu", prefix);
  if (!mu.is_array()) throw ConfigParseError(ConfigErrc::kInvalidValue, prefix + "mu", "expected an array");
  if (mu.size() != rows) {
    std::ostringstream os;
    os << "mu has " << mu.size() << " entries but sigma has " << rows << " rows";
    throw ConfigParseError(ConfigErrc::kDimensionMismatch, prefix + "mu", os.str());
  }
  spec.mu.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t k = 0; k < rows; ++k) {
    spec.mu(static_cast<Eigen::Index>(k)) = number_at(mu[k], prefix + "mu[" + std::to_string(k) + "]");
  }

  if (auto it = obj.find("labels"); it != obj.end()) {
    if (!it->is_array()) throw ConfigParseError(ConfigErrc::kInvalidValue, prefix + "labels", "expected an array");
    if (it->size() != rows) {
      throw ConfigParseError(ConfigErrc::kDimensionMismatch, prefix + "labels",
                             "need one label per security");
    }
    for (const auto& l : *it) {
      if (!l.is_string()) throw ConfigParseError(ConfigErrc::kInvalidValue, prefix + "labels", "labels must be strings");
      spec.labels.push_back(l.get<std::string>());
    }
  }

  try {
    spec.validate();
  } catch (const StructuralError& e) {
    throw ConfigParseError(ConfigErrc::kRankDeficient, prefix + "sigma", e.what());
  }
  return spec;
}

json market_to_json(const MarketSpec& spec) {
  json j;
  j["r"] = spec.r;
  j["mu"] = std::vector<double>(spec.mu.data(), spec.mu.data() + spec.mu.size());
  json sigma = json::array();
  for (Eigen::Index k = 0; k < spec.sigma.rows(); ++k) {
    json row = json::array();
    for (Eigen::Index d = 0; d < spec.sigma.cols(); ++d) row.push_back(spec.sigma(k, d));
    sigma.push_back(std::move(row));
  }
  j["sigma"] = std::move(sigma);
  if (!spec.labels.empty()) j["labels"] = spec.labels;
  return j;
}

}  // namespace

MarketConfig parse_market_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(ConfigErrc::kSyntax, "", e.what());
  } catch (const json::out_of_range& e) {
    // Number literals too large for a double, e.g. 1e999.
    throw ConfigParseError(ConfigErrc::kNonFinite, "", e.what());
  }
  if (!doc.is_object()) throw ConfigParseError(ConfigErrc::kSyntax, "", "top level must be an object");

  MarketConfig cfg;
  auto sched = doc.find("schedule");
  if (sched == doc.end()) {
    cfg.schedule.push_back(Segment{0.0, parse_market(doc, "")});
    return cfg;
  }

  cfg.is_schedule = true;
  if (!sched->is_array() || sched->empty()) {
    throw ConfigParseError(ConfigErrc::kInvalidValue, "schedule", "expected a non-empty array");
  }
  for (std::size_t s = 0; s < sched->size(); ++s) {
    const std::string prefix = "schedule[" + std::to_string(s) + "].";
    const json& seg = (*sched)[s];
    if (!seg.is_object()) throw ConfigParseError(ConfigErrc::kSyntax, prefix, "expected an object");
    const double duration = number_at(require(seg, "duration", prefix), prefix + "duration");
    if (!(duration > 0.0)) {
      throw ConfigParseError(ConfigErrc::kInvalidValue, prefix + "duration", "must be positive");
    }
    MarketSpec spec = parse_market(seg, prefix);
    if (s > 0) {
      const auto& first = cfg.schedule.front().market;
      if (spec.num_securities() != first.num_securities() ||
          spec.brownian_dim() != first.brownian_dim()) {
        throw ConfigParseError(ConfigErrc::kDimensionMismatch, prefix + "sigma",
                               "segment shape differs from schedule[0]");
      }
    }
    cfg.schedule.push_back(Segment{duration, std::move(spec)});
  }
  return cfg;
}

MarketConfig load_market_config(const std::string& path) {
  return parse_market_config(read_file(path));
}

std::string serialize_market_config(const MarketConfig& config) {
  json doc;
  if (!config.is_schedule) {
    doc = market_to_json(config.market());
  } else {
    json arr = json::array();
    for (const auto& seg : config.schedule) {
      json j = market_to_json(seg.market);
      j["duration"] = seg.duration;
      arr.push_back(std::move(j));
    }
    doc["schedule"] = std::move(arr);
  }
  return doc.dump(2) + "\n";
}

}  // namespace scapm::cli
