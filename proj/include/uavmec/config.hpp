#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "uavmec/model.hpp"

namespace uavmec {

/// Schema or range violation in a config. field() is a JSON-pointer-like
/// path such as "ues[2].input_bits".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Unit { kHertz, kSeconds, kBits, kGain, kWatts, kMeters, kPlain };

/// Parses "20 MHz", "-30 dB", "-60 dBm", "400 Mbits" and bare numbers into
/// linear SI values. A leading U+2212 minus sign is accepted.
double parse_quantity(const std::string& text, Unit unit, const std::string& field);

/// Reference scenario overridden by every key present in j. Unknown keys are
/// rejected. The result is validated.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

/// Linear-scale echo of every field; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const ScenarioConfig& cfg);

}  // namespace uavmec
