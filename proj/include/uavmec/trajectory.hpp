#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "uavmec/model.hpp"

namespace uavmec {

struct ScaOptions {
  double eps1 = 1e-4;         // relative objective change that ends SCA
  int max_iterations = 100;
  double speed_floor = 0.1;   // lower bound on the slack speed, m/s
  double inner_tol = 1e-5;    // barrier gap, relative to the objective
  int max_newton_steps = 2000;
  // Leave saddle points (e.g. collinear waypoints with nothing pulling them
  // sideways) along the most negative curvature direction, then resume SCA.
  int max_escapes = 20;
};

/// SCA bookkeeping: current expansion point, its slack speeds and the true
/// objective after every accepted step.
struct ScaState {
  Trajectory iterate;
  std::vector<double> slack_speed;  // size N+1, entry 0 unused
  std::vector<double> objective_trace;
  int iteration = 0;
};

/// Propulsion energy plus both transmit energies along u, for fixed bits and
/// bandwidth.
double trajectory_objective(const Trajectory& u, const TaskAllocation& l, const BandwidthAllocation& b,
                            const ScenarioConfig& cfg);

/// Straight line when its speed clears twice the floor, otherwise a closed
/// loop superimposed on the line so every slot moves.
Trajectory initial_trajectory(const ScenarioConfig& cfg, double speed_floor = 0.1);

/// Convex surrogate around an expansion point. Variables are the free
/// waypoints u[1..N-1] followed by the slack speeds vtilde[1..N]. The
/// propulsion term theta2/|v| is replaced by theta2/vtilde under the
/// linearized cut vtilde^2 tau^2 <= 2 d^T (u[n]-u[n-1]) - |d|^2, where d is
/// the expansion point's displacement in slot n.
class ApproxProblem {
 public:
  ApproxProblem(const Trajectory& expansion, const TaskAllocation& l, const BandwidthAllocation& b,
                const ScenarioConfig& cfg, double speed_floor);

  int slots() const { return slots_; }
  int dimension() const { return 3 * slots_ - 2; }
  int constraint_count() const { return 3 * slots_; }

  Eigen::VectorXd pack(const Trajectory& u, const std::vector<double>& vtilde) const;
  Trajectory trajectory(const Eigen::VectorXd& x) const;
  std::vector<double> slack_speeds(const Eigen::VectorXd& x) const;

  double objective(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  /// Constraint values g_j(x) <= 0: speed limit, linearized cut and slack
  /// floor for each slot.
  Eigen::VectorXd constraints(const Eigen::VectorXd& x) const;
  bool strictly_feasible(const Eigen::VectorXd& x) const;

  /// Left minus right side of the linearized cut for slot n.
  double speed_cut(int n, const Vec2& displacement, double vtilde) const;

  /// A strictly feasible point near the expansion point, if one exists.
  bool interior_start(Eigen::VectorXd& x) const;

  double barrier(const Eigen::VectorXd& x) const;
  Eigen::VectorXd barrier_gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd barrier_hessian(const Eigen::VectorXd& x) const;

 private:
  Vec2 waypoint(const Eigen::VectorXd& x, int n) const;
  double slack(const Eigen::VectorXd& x, int n) const { return x[2 * (slots_ - 1) + n - 1]; }
  int u_index(int n) const { return 2 * (n - 1); }  // valid for 1 <= n <= N-1
  int v_index(int n) const { return 2 * (slots_ - 1) + n - 1; }

  int slots_;
  double tau_, theta1_, theta2_, step_max_, floor_, altitude_sq_;
  Vec2 start_, end_;
  Trajectory expansion_;
  std::vector<Vec2> cut_dir_;       // d_n, size N+1
  std::vector<double> weight_;      // sum of transmit weights on slot n
  std::vector<Vec2> weighted_anchor_;
  std::vector<double> anchor_const_;
};

struct InnerResult {
  Eigen::VectorXd x;
  int newton_steps = 0;
  double gap = 0.0;          // m / t at termination
  double stationarity = 0.0; // |grad F + sum mu grad g|_inf / max(1, |grad F|_inf)
};

class TrajectorySolveError : public std::runtime_error {
 public:
  TrajectorySolveError(const std::string& what, Trajectory best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const Trajectory& best() const { return best_; }

 private:
  Trajectory best_;
};

/// Barrier method with Newton centering from a strictly feasible start.
/// The returned point never has a larger surrogate objective than start.
InnerResult solve_inner(const ApproxProblem& problem, const Eigen::VectorXd& start, double tol,
                        int max_newton_steps = 2000);

/// Hessian of trajectory_objective over the free waypoints u[1..N-1],
/// ordered (x1, y1, x2, y2, ...).
Eigen::MatrixXd trajectory_hessian(const Trajectory& u, const TaskAllocation& l, const BandwidthAllocation& b,
                                   const ScenarioConfig& cfg);

/// A speed-feasible trajectory with a lower objective than `current`, found
/// by backtracking along the eigenvector of the most negative Hessian
/// eigenvalue. Empty when the curvature is nonnegative or no step helps.
std::optional<Trajectory> escape_saddle(const Trajectory& u, double current, const TaskAllocation& l,
                                        const BandwidthAllocation& b, const ScenarioConfig& cfg);

struct ScaResult {
  Trajectory trajectory;
  ScaState state;
  bool converged = false;
  int newton_steps = 0;
  int escapes = 0;
};

ScaResult sca_solve(const TaskAllocation& l, const BandwidthAllocation& b, const Trajectory& u_init,
                    const ScenarioConfig& cfg, const ScaOptions& opts = {});

}  // namespace uavmec
