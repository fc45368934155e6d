#pragma once

#include <stdexcept>
#include <vector>

#include "uavmec/model.hpp"

namespace uavmec {

/// Lagrange multipliers of the task subproblem (fixed bandwidth and
/// trajectory).
struct TaskDuals {
  SlotGrid lambda;           // causality duals, slots 1..N-1 (slot N unused, slot 1 always 0)
  std::vector<double> eta;   // relay balance dual, per UE
  std::vector<double> beta;  // task total dual, per UE

  TaskDuals() = default;
  TaskDuals(int ues, int slots) : lambda(ues, slots), eta(ues, 0.0), beta(ues, 0.0) {}
};

enum class DualSearch {
  /// Exact: causality duals as a nondecreasing buffer-price sequence, found
  /// by merging adjacent slot blocks whose clearing prices decrease.
  kMonotoneBlocks,
  /// Projected subgradient on lambda with nested root finds on beta and eta.
  kSubgradient,
};

struct TaskSolveOptions {
  double tol = 1e-9;            // equality/causality residual, relative to I_k
  double eps1 = 1e-4;           // subgradient: relative dual-value change
  int max_iterations = 20000;   // subgradient iteration cap
  bool allow_local = true;      // false pins local computing to zero
  DualSearch method = DualSearch::kMonotoneBlocks;
};

struct TaskSolveReport {
  int outer_iterations = 0;
  double max_causality_violation = 0.0;  // bits
  std::vector<double> task_equality_residual;   // bits, per UE
  std::vector<double> relay_equality_residual;  // bits, per UE
  double objective = 0.0;   // compute + transmit energy of the returned allocation
  double dual_value = 0.0;
  double duality_gap_estimate = 0.0;  // objective - dual_value, J
  double complementary_slackness = 0.0;  // max lambda*slack / (price scale * I_k)
  double stationarity = 0.0;             // max |marginal energy - price| / price scale
  bool converged = false;
};

struct TaskSolution {
  TaskAllocation allocation;
  TaskDuals duals;
  TaskSolveReport report;
};

class TaskSolveError : public std::runtime_error {
 public:
  TaskSolveError(const std::string& what, TaskSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const TaskSolution& best() const { return best_; }

 private:
  TaskSolution best_;
};

/// Closed-form minimizer of the task Lagrangian for given duals.
TaskAllocation primal_from_duals(const TaskDuals& duals, const BandwidthAllocation& b,
                                 const Trajectory& u, const ScenarioConfig& cfg,
                                 bool allow_local = true);

TaskSolution solve_task_allocation(const BandwidthAllocation& b, const Trajectory& u,
                                   const ScenarioConfig& cfg, const TaskSolveOptions& opts = {});

/// Compute plus transmit energy (everything except propulsion).
double task_objective(const TaskAllocation& l, const BandwidthAllocation& b, const Trajectory& u,
                      const ScenarioConfig& cfg);

struct TaskKkt {
  double primal_residual = 0.0;  // max equality/causality residual / I_k
  double complementary_slackness = 0.0;
  double stationarity = 0.0;
  double dual_value = 0.0;
  double duality_gap = 0.0;
};

/// KKT residuals of an allocation/dual pair, computed from the energy
/// derivatives rather than the closed forms.
TaskKkt evaluate_task_kkt(const TaskAllocation& l, const TaskDuals& duals,
                          const BandwidthAllocation& b, const Trajectory& u,
                          const ScenarioConfig& cfg, bool allow_local = true);

}  // namespace uavmec
