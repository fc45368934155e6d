// Command-line front end: solve, baseline, sweep, validate.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "uavmec/alternating.hpp"
#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"
#include "uavmec/results_io.hpp"
#include "uavmec/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uavmec;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

struct Common {
  std::string config;
  std::string out_dir = "out";
  std::optional<double> tol;
  std::optional<double> tol_inner;
  std::optional<int> max_outer;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool with_out_dir = true) {
  app->add_option("--config", c.config, "JSON scenario file (defaults to the reference scenario)");
  if (with_out_dir) app->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--tol", c.tol, "relative TEC change that ends the outer loop");
  app->add_option("--tol-inner", c.tol_inner, "SCA stopping tolerance");
  app->add_option("--max-outer", c.max_outer, "outer iteration cap")->check(CLI::PositiveNumber);
  app->add_flag("--quiet", c.quiet, "no progress output");
}

ScenarioConfig load_with_overrides(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? ScenarioConfig::reference() : load_config(c.config);
  if (c.tol) cfg.tol_outer = *c.tol;
  if (c.tol_inner) cfg.tol_inner = *c.tol_inner;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", std::string("command-line override: ") + e.what());
  }
  return cfg;
}

SolveOptions options_for(const ScenarioConfig& cfg, const Common& c) {
  SolveOptions o = SolveOptions::from_config(cfg);
  if (c.max_outer) o.max_outer = *c.max_outer;
  return o;
}

void report_error(const char* status, const std::string& message, const json& extra = json::object()) {
  json j = {{"status", status}, {"message", message}};
  j.update(extra);
  std::cerr << j.dump() << '\n';
}

int run_single(const std::string& scheme, const Common& c) {
  const ScenarioConfig cfg = load_with_overrides(c);
  const SolveOptions opts = options_for(cfg, c);
  try {
    const Solution s = run_scheme(scheme, cfg, opts);
    const BlockCertificates cert = certify_blocks(s, cfg, opts);
    write_run(c.out_dir, scheme, s, cfg, &cert);
    if (!c.quiet) {
      std::printf("%s: TEC %.9g J (UE %.6g, UAV %.6g, fly %.6g) in %d outer iterations, %s, %zu violations\n",
                  scheme.c_str(), s.report.energy.tec, s.report.energy.ue_total(), s.report.energy.uav_total(),
                  s.report.energy.fly_total(), s.report.outer_iterations,
                  s.report.converged ? "converged" : "iteration cap reached", s.report.violations.size());
      std::printf("wrote %s\n", fs::path(c.out_dir).string().c_str());
    }
    return s.report.violations.empty() ? kOk : kSolverFailure;
  } catch (const SolveError& e) {
    const Solution& best = e.best();
    json extra = {{"scheme", scheme}, {"outer_iterations", best.report.outer_iterations}};
    if (!best.report.tec_trace.empty()) extra["last_tec_j"] = best.report.tec_trace.back();
    report_error("solver_failure", e.what(), extra);
    return kSolverFailure;
  }
}

int run_sweep_cmd(const std::string& spec_path, const std::string& param, const std::vector<std::string>& values,
                  const std::vector<std::string>& schemes, int jobs, const Common& c) {
  SweepSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw ConfigError("", "cannot open sweep spec " + spec_path);
    try {
      spec = SweepSpec::from_json(json::parse(in, nullptr, true, true));
    } catch (const json::parse_error& e) {
      throw ConfigError("", "invalid JSON in " + spec_path + ": " + e.what());
    }
  }
  if (!param.empty()) spec.parameter = param;
  if (!values.empty()) spec.values = values;
  if (!schemes.empty()) spec.schemes = schemes;
  spec.validate();

  const ScenarioConfig cfg = load_with_overrides(c);
  const SolveOptions opts = options_for(cfg, c);
  const auto rows = run_sweep(cfg, spec, opts, jobs, c.out_dir, [&](const SweepRow& r) {
    if (c.quiet) return;
    if (r.status == "ok") {
      std::printf("%s=%s %-17s TEC %.9g J\n", r.parameter.c_str(), r.value.c_str(), r.scheme.c_str(), r.tec);
    } else {
      std::printf("%s=%s %-17s %s: %s\n", r.parameter.c_str(), r.value.c_str(), r.scheme.c_str(),
                  r.status.c_str(), r.error.c_str());
    }
    std::fflush(stdout);
  });

  int code = kOk;
  for (const SweepRow& r : rows) {
    if (r.status == "solver_failure") code = kSolverFailure;
    else if (r.status == "config_error" && code == kOk) code = kConfigError;
  }
  if (code != kOk) {
    json failed = json::array();
    for (const SweepRow& r : rows) {
      if (r.status != "ok") failed.push_back({{"value", r.value}, {"scheme", r.scheme}, {"status", r.status},
                                              {"message", r.error}});
    }
    report_error(code == kSolverFailure ? "solver_failure" : "config_error", "sweep points failed",
                 {{"failed", failed}});
  }
  if (!c.quiet) std::printf("wrote %s\n", (fs::path(c.out_dir) / "sweep.csv").string().c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimizing task, bandwidth and trajectory planner for a UAV relay"};
  app.require_subcommand(1);

  Common solve_opts, base_opts, sweep_opts, validate_opts;

  auto* solve_cmd = app.add_subcommand("solve", "run the alternating solver");
  add_common(solve_cmd, solve_opts);

  auto* base_cmd = app.add_subcommand("baseline", "run one comparison scheme");
  std::string kind;
  base_cmd->add_option("kind", kind, "local_computing | direct_trajectory | offloading_only | equal_bandwidth")
      ->required();
  add_common(base_cmd, base_opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "solve over a list of parameter values");
  std::string spec_path, param;
  std::vector<std::string> values, schemes;
  int jobs = 1;
  sweep_cmd->add_option("spec", spec_path, "JSON sweep spec {parameter, values, schemes}");
  sweep_cmd->add_option("--param", param, "task_size_uniform | completion_time | ap_position");
  sweep_cmd->add_option("--values", values, "values (Mbits, seconds or x:y)")->delimiter(',');
  sweep_cmd->add_option("--schemes", schemes, "proposed and/or baseline names")->delimiter(',');
  sweep_cmd->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  add_common(sweep_cmd, sweep_opts);

  auto* validate_cmd = app.add_subcommand("validate", "check a config without solving");
  std::string validate_path;
  validate_cmd->add_option("config_file", validate_path, "JSON scenario file");
  add_common(validate_cmd, validate_opts, /*with_out_dir=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve_cmd) return run_single("proposed", solve_opts);
    if (*base_cmd) {
      if (!parse_baseline(kind)) throw ConfigError("kind", "unknown baseline \"" + kind + "\"");
      return run_single(kind, base_opts);
    }
    if (*sweep_cmd) return run_sweep_cmd(spec_path, param, values, schemes, jobs, sweep_opts);
    if (*validate_cmd) {
      if (!validate_path.empty()) validate_opts.config = validate_path;
      const ScenarioConfig cfg = load_with_overrides(validate_opts);
      if (!validate_opts.quiet) {
        std::printf("config ok: K=%d N=%d T=%g s, straight-line speed %.6g m/s (vmax %g)\n", cfg.ue_count(),
                    cfg.slots, cfg.horizon_s, norm(cfg.uav_end - cfg.uav_start) / cfg.horizon_s, cfg.vmax_mps);
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    report_error("config_error", e.what(), {{"field", e.field()}});
    return kConfigError;
  } catch (const std::exception& e) {
    report_error("solver_failure", e.what());
    return kSolverFailure;
  }
  return kConfigError;
}
