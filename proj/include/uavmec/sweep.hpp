#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/alternating.hpp"

namespace uavmec {

/// "proposed" runs the full solver; any baseline name runs that baseline.
Solution run_scheme(const std::string& scheme, const ScenarioConfig& cfg, const SolveOptions& opts);
bool is_known_scheme(const std::string& scheme);

/// One-parameter sweep. Values are text so that ap_position can be "x:y";
/// task_size_uniform is in Mbits and completion_time in seconds.
struct SweepSpec {
  std::string parameter;  // task_size_uniform | completion_time | ap_position
  std::vector<std::string> values;
  std::vector<std::string> schemes{"proposed"};

  /// Throws ConfigError on an unknown parameter or scheme or empty lists.
  void validate() const;
  static SweepSpec from_json(const nlohmann::json& j);
};

/// Scenario for one sweep point; throws ConfigError when the value is
/// malformed or makes the scenario invalid.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                 const std::string& value);

struct SweepRow {
  std::string parameter;
  std::string value;
  std::string scheme;
  std::string status = "ok";  // ok | config_error | solver_failure
  double tec = 0.0;
  double ue_energy = 0.0;
  double uav_energy = 0.0;
  double fly_energy = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  std::string error;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& r);

/// Runs every (value, scheme) pair on up to `jobs` threads. Rows come back
/// in value-major, scheme-minor order regardless of scheduling. When out_dir
/// is non-empty each point is written to out_dir/points/ as it finishes and
/// the rows are then merged into out_dir/sweep.csv.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec, const SolveOptions& opts,
                                int jobs, const std::filesystem::path& out_dir = {},
                                const std::function<void(const SweepRow&)>& on_row = {});

}  // namespace uavmec
