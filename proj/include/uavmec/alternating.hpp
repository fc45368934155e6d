#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "uavmec/bandwidth.hpp"
#include "uavmec/model.hpp"
#include "uavmec/task_allocation.hpp"
#include "uavmec/trajectory.hpp"

namespace uavmec {

struct SolveOptions {
  double tol_outer = 1e-4;  // relative TEC change between outer iterations
  int max_outer = 50;
  TaskSolveOptions task;
  ScaOptions sca;
  bool optimize_bandwidth = true;
  bool optimize_trajectory = true;

  /// Tolerances taken from the scenario: outer from tol_outer, SCA from
  /// tol_inner with the barrier gap one decade tighter.
  static SolveOptions from_config(const ScenarioConfig& cfg);
};

/// TEC after each block of one outer iteration.
struct BlockTrace {
  double after_task = 0.0;
  double after_bandwidth = 0.0;
  double after_trajectory = 0.0;
};

struct SolveReport {
  int outer_iterations = 0;
  std::vector<double> tec_trace;  // TEC at the end of each outer iteration
  std::vector<BlockTrace> blocks;
  EnergyBreakdown energy;
  std::vector<Violation> violations;
  double wall_time = 0.0;  // seconds
  bool converged = false;

  // Diagnostics from the last pass of each block.
  TaskSolveReport task;
  BandwidthReport bandwidth;
  std::vector<double> sca_trace;
  std::vector<std::vector<double>> sca_traces;  // true objective per SCA pass, one per outer iteration
  int sca_iterations = 0;
  int newton_steps = 0;
};

struct Solution {
  TaskAllocation tasks;
  BandwidthAllocation bandwidth;
  Trajectory trajectory;
  TaskDuals task_duals;
  BandwidthDuals bandwidth_duals;
  SolveReport report;
};

/// A block failed; best() holds the last consistent iterate.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, Solution best) : std::runtime_error(what), best_(std::move(best)) {}
  const Solution& best() const { return best_; }

 private:
  Solution best_;
};

/// Task, bandwidth and trajectory blocks in turn until the relative TEC
/// change drops below tol_outer. A block that is switched off keeps its
/// starting value (equal bandwidth split, straight-line trajectory).
Solution solve(const ScenarioConfig& cfg, const SolveOptions& opts);
Solution solve(const ScenarioConfig& cfg);

/// KKT residuals of the convex blocks at a final iterate. Each enabled block
/// is re-solved on the final data of the other two and checked against the
/// energy derivatives.
struct BlockCertificates {
  TaskKkt task;
  std::optional<double> bandwidth_stationarity;   // max |nu + dE/db| / nu
  std::optional<double> bandwidth_split_residual;  // max |b_ue + b_uav - B| / B
  double task_block_change = 0.0;       // relative TEC drop from re-solving the task block
  double bandwidth_block_change = 0.0;  // same for the bandwidth block
};

BlockCertificates certify_blocks(const Solution& s, const ScenarioConfig& cfg, const SolveOptions& opts);

}  // namespace uavmec
