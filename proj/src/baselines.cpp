#include "uavmec/baselines.hpp"

#include <chrono>

namespace uavmec {

const std::vector<BaselineKind>& all_baselines() {
  static const std::vector<BaselineKind> kinds{BaselineKind::kLocalComputing, BaselineKind::kDirectTrajectory,
                                               BaselineKind::kOffloadingOnly, BaselineKind::kEqualBandwidth};
  return kinds;
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLocalComputing: return "local_computing";
    case BaselineKind::kDirectTrajectory: return "direct_trajectory";
    case BaselineKind::kOffloadingOnly: return "offloading_only";
    case BaselineKind::kEqualBandwidth: return "equal_bandwidth";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
  for (BaselineKind k : all_baselines()) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

Solution local_computing(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  Solution s;
  s.tasks = TaskAllocation(K, N);
  // Cubic per-slot energy is minimized by the uniform split.
  for (int k = 0; k < K; ++k) {
    for (int n = 1; n <= N; ++n) s.tasks.local(k, n) = cfg.ues[k].input_bits / N;
  }
  s.bandwidth = BandwidthAllocation(K, N);
  s.trajectory = Trajectory::straight_line(cfg);
  s.task_duals = TaskDuals(K, N);

  SolveReport& rep = s.report;
  rep.energy = total_energy(s.tasks, s.bandwidth, s.trajectory, cfg);
  rep.tec_trace = {rep.energy.tec};
  rep.blocks = {BlockTrace{rep.energy.tec, rep.energy.tec, rep.energy.tec}};
  rep.violations = check_feasibility(s.tasks, s.bandwidth, s.trajectory, cfg);
  rep.converged = true;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace

Solution run_baseline(BaselineKind kind, const ScenarioConfig& cfg) {
  return run_baseline(kind, cfg, SolveOptions::from_config(cfg));
}

Solution run_baseline(BaselineKind kind, const ScenarioConfig& cfg, const SolveOptions& opts) {
  SolveOptions o = opts;
  switch (kind) {
    case BaselineKind::kLocalComputing:
      return local_computing(cfg);
    case BaselineKind::kDirectTrajectory:
      o.optimize_trajectory = false;
      break;
    case BaselineKind::kOffloadingOnly:
      o.task.allow_local = false;
      break;
    case BaselineKind::kEqualBandwidth:
      o.optimize_bandwidth = false;
      break;
  }
  return solve(cfg, o);
}

}  // namespace uavmec
