#include "uavmec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"
#include "uavmec/results_io.hpp"

namespace uavmec {

bool is_known_scheme(const std::string& scheme) {
  return scheme == "proposed" || parse_baseline(scheme).has_value();
}

Solution run_scheme(const std::string& scheme, const ScenarioConfig& cfg, const SolveOptions& opts) {
  if (scheme == "proposed") return solve(cfg, opts);
  const auto kind = parse_baseline(scheme);
  if (!kind) throw ConfigError("scheme", "unknown scheme \"" + scheme + "\"");
  return run_baseline(*kind, cfg, opts);
}

void SweepSpec::validate() const {
  if (parameter != "task_size_uniform" && parameter != "completion_time" && parameter != "ap_position") {
    throw ConfigError("sweep.parameter", "unknown sweep parameter \"" + parameter + "\"");
  }
  if (values.empty()) throw ConfigError("sweep.values", "at least one value is required");
  if (schemes.empty()) throw ConfigError("sweep.schemes", "at least one scheme is required");
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    if (!is_known_scheme(schemes[i])) {
      throw ConfigError("sweep.schemes[" + std::to_string(i) + "]", "unknown scheme \"" + schemes[i] + "\"");
    }
  }
}

SweepSpec SweepSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep", "expected an object");
  SweepSpec s;
  for (const auto& [key, v] : j.items()) {
    if (key == "parameter") {
      if (!v.is_string()) throw ConfigError("sweep.parameter", "expected a string");
      s.parameter = v.get<std::string>();
    } else if (key == "values" || key == "schemes") {
      if (!v.is_array()) throw ConfigError("sweep." + key, "expected an array");
      std::vector<std::string> out;
      for (const auto& e : v) {
        if (e.is_string()) out.push_back(e.get<std::string>());
        else if (e.is_number() && key == "values") out.push_back(format_double(e.get<double>()));
        else throw ConfigError("sweep." + key, "unexpected element " + e.dump());
      }
      (key == "values" ? s.values : s.schemes) = std::move(out);
    } else {
      throw ConfigError("sweep." + key, "unknown key");
    }
  }
  s.validate();
  return s;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                 const std::string& value) {
  ScenarioConfig cfg = base;
  const std::string field = "sweep." + parameter;
  if (parameter == "task_size_uniform") {
    // Bare numbers are Mbits; explicit units are honored.
    char* end = nullptr;
    const double plain = std::strtod(value.c_str(), &end);
    const bool bare = end != value.c_str() && std::string(end).find_first_not_of(" \t") == std::string::npos;
    const double bits = bare ? 1e6 * plain : parse_quantity(value, Unit::kBits, field);
    for (UeSpec& ue : cfg.ues) ue.input_bits = bits;
  } else if (parameter == "completion_time") {
    cfg.horizon_s = parse_quantity(value, Unit::kSeconds, field);
  } else if (parameter == "ap_position") {
    const auto colon = value.find(':');
    if (colon == std::string::npos) throw ConfigError(field, "expected x:y, got \"" + value + "\"");
    cfg.ap_position = {parse_quantity(value.substr(0, colon), Unit::kMeters, field),
                       parse_quantity(value.substr(colon + 1), Unit::kMeters, field)};
  } else {
    throw ConfigError("sweep.parameter", "unknown sweep parameter \"" + parameter + "\"");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, std::string("value ") + value + " gives an invalid scenario: " + e.what());
  }
  return cfg;
}

std::string sweep_csv_header() {
  return "parameter,value,scheme,status,tec_j,ue_energy_j,uav_energy_j,fly_energy_j,outer_iterations,converged";
}

std::string sweep_csv_row(const SweepRow& r) {
  std::ostringstream os;
  const bool ok = r.status == "ok";
  const auto num = [&](double v) { return ok ? format_double(v) : std::string(); };
  os << r.parameter << ',' << r.value << ',' << r.scheme << ',' << r.status << ',' << num(r.tec) << ','
     << num(r.ue_energy) << ',' << num(r.uav_energy) << ',' << num(r.fly_energy) << ',' << r.outer_iterations
     << ',' << (r.converged ? "true" : "false");
  return os.str();
}

namespace {

SweepRow run_point(const ScenarioConfig& base, const SweepSpec& spec, const std::string& value,
                   const std::string& scheme, const SolveOptions& opts) {
  SweepRow row;
  row.parameter = spec.parameter;
  row.value = value;
  row.scheme = scheme;
  try {
    const ScenarioConfig cfg = apply_sweep_value(base, spec.parameter, value);
    const Solution s = run_scheme(scheme, cfg, opts);
    row.tec = s.report.energy.tec;
    row.ue_energy = s.report.energy.ue_total();
    row.uav_energy = s.report.energy.uav_total();
    row.fly_energy = s.report.energy.fly_total();
    row.outer_iterations = s.report.outer_iterations;
    row.converged = s.report.converged;
  } catch (const ConfigError& e) {
    row.status = "config_error";
    row.error = e.what();
  } catch (const std::exception& e) {
    row.status = "solver_failure";
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec, const SolveOptions& opts,
                                int jobs, const std::filesystem::path& out_dir,
                                const std::function<void(const SweepRow&)>& on_row) {
  spec.validate();
  const std::size_t total = spec.values.size() * spec.schemes.size();
  std::vector<SweepRow> rows(total);
  const std::filesystem::path points = out_dir.empty() ? out_dir : out_dir / "points";
  if (!points.empty()) std::filesystem::create_directories(points);

  std::atomic<std::size_t> next{0};
  std::mutex report_mu;
  const auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::string& value = spec.values[i / spec.schemes.size()];
      const std::string& scheme = spec.schemes[i % spec.schemes.size()];
      rows[i] = run_point(base, spec, value, scheme, opts);
      if (!points.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%04zu.csv", i);
        write_file_atomic(points / name, sweep_csv_header() + "\n" + sweep_csv_row(rows[i]) + "\n");
      }
      if (on_row) {
        std::lock_guard lock(report_mu);
        on_row(rows[i]);
      }
    }
  };

  const int n_threads = static_cast<int>(std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, total));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (!out_dir.empty()) {
    std::string merged = sweep_csv_header() + "\n";
    for (const SweepRow& r : rows) merged += sweep_csv_row(r) + "\n";
    write_file_atomic(out_dir / "sweep.csv", merged);
  }
  return rows;
}

}  // namespace uavmec
