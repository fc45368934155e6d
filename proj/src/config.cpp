#include "uavmec/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace uavmec {

using nlohmann::json;

namespace {

std::string normalize_minus(std::string s) {
  const std::string uminus = "\xE2\x88\x92";  // U+2212
  for (std::size_t p = s.find(uminus); p != std::string::npos; p = s.find(uminus)) s.replace(p, 3, "-");
  return s;
}

// Multipliers for linear unit suffixes, keyed by unit family.
const std::map<std::string, double>& scale_table(Unit unit) {
  static const std::map<std::string, double> hz{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::map<std::string, double> sec{{"s", 1.0}, {"ms", 1e-3}};
  static const std::map<std::string, double> bits{{"bit", 1.0},   {"bits", 1.0},  {"kbit", 1e3}, {"kbits", 1e3},
                                                  {"Mbit", 1e6},  {"Mbits", 1e6}, {"Gbit", 1e9}, {"Gbits", 1e9}};
  static const std::map<std::string, double> watts{{"W", 1.0}, {"mW", 1e-3}};
  static const std::map<std::string, double> meters{{"m", 1.0}, {"km", 1e3}};
  static const std::map<std::string, double> none;
  switch (unit) {
    case Unit::kHertz: return hz;
    case Unit::kSeconds: return sec;
    case Unit::kBits: return bits;
    case Unit::kWatts: return watts;
    case Unit::kMeters: return meters;
    default: return none;
  }
}

}  // namespace

double parse_quantity(const std::string& raw, Unit unit, const std::string& field) {
  const std::string text = normalize_minus(raw);
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) throw ConfigError(field, "expected a number with optional unit, got \"" + raw + "\"");
  std::string suffix(end);
  suffix.erase(0, suffix.find_first_not_of(" \t"));
  suffix.erase(suffix.find_last_not_of(" \t") + 1);
  if (suffix.empty()) return value;

  if (suffix == "dB" && (unit == Unit::kGain || unit == Unit::kWatts)) return std::pow(10.0, value / 10.0);
  if (unit == Unit::kWatts && suffix == "dBW") return std::pow(10.0, value / 10.0);
  if (unit == Unit::kWatts && suffix == "dBm") return std::pow(10.0, (value - 30.0) / 10.0);
  const auto& table = scale_table(unit);
  if (auto it = table.find(suffix); it != table.end()) return value * it->second;
  throw ConfigError(field, "unknown unit \"" + suffix + "\"");
}

namespace {

double read_number(const json& j, Unit unit, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_quantity(j.get<std::string>(), unit, field);
  throw ConfigError(field, "expected a number or a quantity string");
}

int read_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !(j.is_number() && std::floor(j.get<double>()) == j.get<double>())) {
    throw ConfigError(field, "expected an integer");
  }
  const double v = j.get<double>();
  if (std::abs(v) > 1e9) throw ConfigError(field, "integer out of range");
  return static_cast<int>(v);
}

Vec2 read_point(const json& j, const std::string& field) {
  if (j.is_array() && j.size() == 2) {
    return {read_number(j[0], Unit::kMeters, field + "[0]"), read_number(j[1], Unit::kMeters, field + "[1]")};
  }
  if (j.is_object()) {
    for (const auto& [key, _] : j.items()) {
      if (key != "x" && key != "y") throw ConfigError(field + "." + key, "unknown key");
    }
    if (!j.contains("x") || !j.contains("y")) throw ConfigError(field, "point needs x and y");
    return {read_number(j["x"], Unit::kMeters, field + ".x"), read_number(j["y"], Unit::kMeters, field + ".y")};
  }
  throw ConfigError(field, "expected [x, y] or {\"x\": .., \"y\": ..}");
}

UeSpec read_ue(const json& j, const std::string& field, const UeSpec& base) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  UeSpec ue = base;
  for (const auto& [key, v] : j.items()) {
    const std::string f = field + "." + key;
    if (key == "position") ue.position = read_point(v, f);
    else if (key == "input_bits") ue.input_bits = read_number(v, Unit::kBits, f);
    else if (key == "cycles_per_bit") ue.cycles_per_bit = read_number(v, Unit::kPlain, f);
    else if (key == "kappa") ue.kappa = read_number(v, Unit::kPlain, f);
    else throw ConfigError(f, "unknown key");
  }
  return ue;
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config root must be a JSON object");
  ScenarioConfig cfg = ScenarioConfig::reference();

  const std::map<std::string, std::pair<double*, Unit>> scalars{
      {"bandwidth_hz", {&cfg.bandwidth_hz, Unit::kHertz}}, {"horizon_s", {&cfg.horizon_s, Unit::kSeconds}},
      {"ref_gain", {&cfg.ref_gain, Unit::kGain}},          {"noise_w", {&cfg.noise_w, Unit::kWatts}},
      {"altitude_m", {&cfg.altitude_m, Unit::kMeters}},    {"vmax_mps", {&cfg.vmax_mps, Unit::kPlain}},
      {"theta1", {&cfg.theta1, Unit::kPlain}},             {"theta2", {&cfg.theta2, Unit::kPlain}},
      {"kappa_uav", {&cfg.kappa_uav, Unit::kPlain}},       {"tol_outer", {&cfg.tol_outer, Unit::kPlain}},
      {"tol_inner", {&cfg.tol_inner, Unit::kPlain}},
  };

  // "ues" first so that per-UE shorthands below apply to the final list.
  if (j.contains("ues")) {
    const json& arr = j["ues"];
    if (!arr.is_array()) throw ConfigError("ues", "expected an array");
    std::vector<UeSpec> ues;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string f = "ues[" + std::to_string(k) + "]";
      const UeSpec base = k < cfg.ues.size() ? cfg.ues[k] : UeSpec{};
      if (k >= cfg.ues.size() && !(arr[k].is_object() && arr[k].contains("position"))) {
        throw ConfigError(f + ".position", "required for UEs beyond the default four");
      }
      ues.push_back(read_ue(arr[k], f, base));
    }
    cfg.ues = std::move(ues);
  }

  for (const auto& [key, v] : j.items()) {
    if (key == "ues") continue;
    if (auto it = scalars.find(key); it != scalars.end()) {
      *it->second.first = read_number(v, it->second.second, key);
    } else if (key == "slots") {
      cfg.slots = read_int(v, key);
    } else if (key == "ap_position") {
      cfg.ap_position = read_point(v, key);
    } else if (key == "uav_start") {
      cfg.uav_start = read_point(v, key);
    } else if (key == "uav_end") {
      cfg.uav_end = read_point(v, key);
    } else if (key == "task_size_uniform") {
      const double bits = read_number(v, Unit::kBits, key);
      for (UeSpec& ue : cfg.ues) ue.input_bits = bits;
    } else if (key == "task_sizes") {
      if (!v.is_array() || v.size() != cfg.ues.size()) {
        throw ConfigError(key, "expected an array with one entry per UE");
      }
      for (std::size_t k = 0; k < v.size(); ++k) {
        cfg.ues[k].input_bits = read_number(v[k], Unit::kBits, key + "[" + std::to_string(k) + "]");
      }
    } else if (key == "$schema" || key == "comment") {
      // ignored
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw ConfigError("", msg);
    throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ScenarioConfig& cfg) {
  const auto pt = [](const Vec2& p) { return json::array({p.x, p.y}); };
  json ues = json::array();
  for (const UeSpec& ue : cfg.ues) {
    ues.push_back({{"position", pt(ue.position)},
                   {"input_bits", ue.input_bits},
                   {"cycles_per_bit", ue.cycles_per_bit},
                   {"kappa", ue.kappa}});
  }
  return {{"bandwidth_hz", cfg.bandwidth_hz}, {"horizon_s", cfg.horizon_s}, {"slots", cfg.slots},
          {"ref_gain", cfg.ref_gain},         {"noise_w", cfg.noise_w},     {"altitude_m", cfg.altitude_m},
          {"vmax_mps", cfg.vmax_mps},         {"theta1", cfg.theta1},       {"theta2", cfg.theta2},
          {"kappa_uav", cfg.kappa_uav},       {"ap_position", pt(cfg.ap_position)},
          {"uav_start", pt(cfg.uav_start)},   {"uav_end", pt(cfg.uav_end)}, {"ues", ues},
          {"tol_outer", cfg.tol_outer},       {"tol_inner", cfg.tol_inner}};
}

}  // namespace uavmec
