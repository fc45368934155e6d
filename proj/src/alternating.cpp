#include "uavmec/alternating.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace uavmec {

SolveOptions SolveOptions::from_config(const ScenarioConfig& cfg) {
  SolveOptions o;
  o.tol_outer = cfg.tol_outer;
  o.sca.eps1 = cfg.tol_inner;
  o.sca.inner_tol = 0.1 * cfg.tol_inner;
  o.task.eps1 = cfg.tol_inner;
  return o;
}

namespace {

// Pairs that carry no bits get their starting split back. Their energy is
// zero either way, but a zero-width link would bar the next task block from
// ever using that slot again.
void reopen_idle_pairs(BandwidthAllocation& b, const TaskAllocation& l, const BandwidthAllocation& start) {
  for (int k = 0; k < b.ue_link.ues(); ++k) {
    for (int n = 1; n <= b.ue_link.slots(); ++n) {
      if (l.ue_offload(k, n) == 0.0 && l.uav_offload(k, n) == 0.0) {
        b.ue_link(k, n) = start.ue_link(k, n);
        b.uav_link(k, n) = start.uav_link(k, n);
      }
    }
  }
}

}  // namespace

Solution solve(const ScenarioConfig& cfg) { return solve(cfg, SolveOptions::from_config(cfg)); }

Solution solve(const ScenarioConfig& cfg, const SolveOptions& opts) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int K = cfg.ue_count();
  const int N = cfg.slots;

  Solution cur;
  cur.tasks = TaskAllocation(K, N);
  const BandwidthAllocation start_bandwidth = BandwidthAllocation::equal_split(cfg);
  cur.bandwidth = start_bandwidth;
  cur.trajectory = opts.optimize_trajectory ? initial_trajectory(cfg, opts.sca.speed_floor)
                                            : Trajectory::straight_line(cfg);
  SolveReport& rep = cur.report;

  double total_bits = 0.0;
  for (const UeSpec& ue : cfg.ues) total_bits += ue.input_bits;

  const auto tec_of = [&](const TaskAllocation& l, const BandwidthAllocation& b, const Trajectory& u) {
    return total_energy(l, b, u, cfg).tec;
  };
  const auto finish = [&](Solution& s) {
    s.report.energy = total_energy(s.tasks, s.bandwidth, s.trajectory, cfg);
    s.report.violations = check_feasibility(s.tasks, s.bandwidth, s.trajectory, cfg);
    s.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const auto fail = [&](const std::string& block, int it, const std::exception& e) -> SolveError {
    Solution best = cur;
    if (it > 1) {
      try {
        finish(best);
      } catch (const std::exception&) {
        best.report.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    }
    return SolveError(block + " block failed at outer iteration " + std::to_string(it) + ": " + e.what(),
                      std::move(best));
  };

  double tec = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_outer; ++it) {
    BlockTrace bt;
    if (opts.optimize_bandwidth && it > 1) reopen_idle_pairs(cur.bandwidth, cur.tasks, start_bandwidth);

    try {
      TaskSolution ts = solve_task_allocation(cur.bandwidth, cur.trajectory, cfg, opts.task);
      const double e = tec_of(ts.allocation, cur.bandwidth, cur.trajectory);
      // Each block is an exact minimizer, so a rise can only be rounding;
      // keep the incumbent then.
      if (it == 1 || e <= tec) {
        cur.tasks = std::move(ts.allocation);
        cur.task_duals = std::move(ts.duals);
        rep.task = ts.report;
        tec = e;
      }
      bt.after_task = tec;
    } catch (const std::exception& e) {
      throw fail("task", it, e);
    }

    if (opts.optimize_bandwidth) {
      try {
        BandwidthSolution bs = solve_bandwidth(cur.tasks, cur.trajectory, cfg);
        const double e = tec_of(cur.tasks, bs.allocation, cur.trajectory);
        if (e <= tec) {
          cur.bandwidth = std::move(bs.allocation);
          cur.bandwidth_duals = std::move(bs.duals);
          rep.bandwidth = bs.report;
          tec = e;
        }
      } catch (const std::exception& e) {
        throw fail("bandwidth", it, e);
      }
    }
    bt.after_bandwidth = tec;

    if (opts.optimize_trajectory) {
      try {
        ScaResult sr = sca_solve(cur.tasks, cur.bandwidth, cur.trajectory, cfg, opts.sca);
        const double e = tec_of(cur.tasks, cur.bandwidth, sr.trajectory);
        if (e <= tec) {
          cur.trajectory = std::move(sr.trajectory);
          tec = e;
        }
        rep.sca_trace = sr.state.objective_trace;
        rep.sca_traces.push_back(sr.state.objective_trace);
        rep.sca_iterations = sr.state.iteration;
        rep.newton_steps += sr.newton_steps;
      } catch (const std::exception& e) {
        throw fail("trajectory", it, e);
      }
    }
    bt.after_trajectory = tec;

    rep.blocks.push_back(bt);
    rep.tec_trace.push_back(tec);
    rep.outer_iterations = it;

    if (total_bits == 0.0) {
      rep.converged = true;
      break;
    }
    if (it >= 2) {
      const double prev = rep.tec_trace[it - 2];
      if (prev - tec <= opts.tol_outer * std::abs(tec)) {
        rep.converged = true;
        break;
      }
    }
  }

  finish(cur);
  return cur;
}

BlockCertificates certify_blocks(const Solution& s, const ScenarioConfig& cfg, const SolveOptions& opts) {
  BlockCertificates c;
  const double tec = total_energy(s.tasks, s.bandwidth, s.trajectory, cfg).tec;
  const double scale = std::max(std::abs(tec), 1e-300);

  const TaskSolution ts = solve_task_allocation(s.bandwidth, s.trajectory, cfg, opts.task);
  c.task = evaluate_task_kkt(ts.allocation, ts.duals, s.bandwidth, s.trajectory, cfg, opts.task.allow_local);
  c.task_block_change = (tec - total_energy(ts.allocation, s.bandwidth, s.trajectory, cfg).tec) / scale;

  if (opts.optimize_bandwidth) {
    const BandwidthSolution bs = solve_bandwidth(s.tasks, s.trajectory, cfg);
    c.bandwidth_stationarity = bs.report.max_stationarity;
    c.bandwidth_split_residual = bs.report.max_split_residual;
    c.bandwidth_block_change = (tec - total_energy(s.tasks, bs.allocation, s.trajectory, cfg).tec) / scale;
  }
  return c;
}

}  // namespace uavmec
