#include <algorithm>

#include "uavmec/model.hpp"

namespace uavmec {

FeasibilityTolerances FeasibilityTolerances::defaults(const ScenarioConfig& cfg) {
  double min_bits = 0.0;
  if (!cfg.ues.empty()) {
    min_bits = std::min_element(cfg.ues.begin(), cfg.ues.end(), [](const UeSpec& a, const UeSpec& b) {
                 return a.input_bits < b.input_bits;
               })->input_bits;
  }
  return {1e-9 * std::max(min_bits, 1.0), 1.0, 1e-6};
}

std::vector<Violation> check_feasibility(const TaskAllocation& l, const BandwidthAllocation& b,
                                         const Trajectory& u, const ScenarioConfig& cfg) {
  return check_feasibility(l, b, u, cfg, FeasibilityTolerances::defaults(cfg));
}

std::vector<Violation> check_feasibility(const TaskAllocation& l, const BandwidthAllocation& b,
                                         const Trajectory& u, const ScenarioConfig& cfg,
                                         const FeasibilityTolerances& tol) {
  std::vector<Violation> out;
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  auto add = [&](const char* name, int k, int n, double excess) {
    out.push_back(Violation{name, k, n, excess});
  };

  for (const SlotGrid* g : {&l.local, &l.ue_offload, &l.uav_compute, &l.uav_offload, &b.ue_link,
                            &b.uav_link}) {
    if (g->ues() != K || g->slots() != N) {
      add("shape", -1, -1, 0.0);
      return out;
    }
  }
  if (u.slots() != N) {
    add("shape", -1, -1, 0.0);
    return out;
  }

  for (int k = 0; k < K; ++k) {
    // Causality: relayed bits up to slot n never exceed bits received by n-1.
    double received = 0.0;
    double relayed = 0.0;
    for (int n = 2; n <= N; ++n) {
      received += l.ue_offload(k, n - 1);
      relayed += l.uav_compute(k, n) + l.uav_offload(k, n);
      if (relayed > received + tol.bits) add("causality", k, n, relayed - received);
    }
    double offloaded = 0.0;
    for (int n = 1; n <= N - 1; ++n) offloaded += l.ue_offload(k, n);
    double forwarded = 0.0;
    for (int n = 2; n <= N; ++n) forwarded += l.uav_compute(k, n) + l.uav_offload(k, n);
    if (std::abs(forwarded - offloaded) > tol.bits) {
      add("relay_balance", k, -1, forwarded - offloaded);
    }
    const double done = l.local.sum_ue(k) + offloaded;
    if (std::abs(done - cfg.ues[k].input_bits) > tol.bits) {
      add("task_total", k, -1, done - cfg.ues[k].input_bits);
    }

    for (int n = 1; n <= N; ++n) {
      if (l.local(k, n) < -tol.bits) add("local_nonnegative", k, n, -l.local(k, n));
      if (l.ue_offload(k, n) < -tol.bits) add("ue_offload_nonnegative", k, n, -l.ue_offload(k, n));
      if (l.uav_compute(k, n) < -tol.bits) add("uav_compute_nonnegative", k, n, -l.uav_compute(k, n));
      if (l.uav_offload(k, n) < -tol.bits) add("uav_offload_nonnegative", k, n, -l.uav_offload(k, n));
      if (b.ue_link(k, n) < -tol.hz) add("ue_link_nonnegative", k, n, -b.ue_link(k, n));
      if (b.uav_link(k, n) < -tol.hz) add("uav_link_nonnegative", k, n, -b.uav_link(k, n));

      const bool ue_active = l.ue_offload(k, n) > tol.bits;
      const bool uav_active = l.uav_offload(k, n) > tol.bits;
      if (ue_active && !(b.ue_link(k, n) > 0.0)) add("ue_link_missing", k, n, l.ue_offload(k, n));
      if (uav_active && !(b.uav_link(k, n) > 0.0)) add("uav_link_missing", k, n, l.uav_offload(k, n));
      const double assigned = b.ue_link(k, n) + b.uav_link(k, n);
      const bool in_use = ue_active || uav_active || std::abs(assigned) > tol.hz;
      if (in_use && std::abs(assigned - cfg.bandwidth_hz) > tol.hz) {
        add("bandwidth_split", k, n, assigned - cfg.bandwidth_hz);
      }
    }
    if (std::abs(l.ue_offload(k, N)) > tol.bits) add("ue_offload_last_slot", k, N, l.ue_offload(k, N));
    if (std::abs(l.uav_compute(k, 1)) > tol.bits) add("uav_compute_first_slot", k, 1, l.uav_compute(k, 1));
    if (std::abs(l.uav_offload(k, 1)) > tol.bits) add("uav_offload_first_slot", k, 1, l.uav_offload(k, 1));
    if (std::abs(b.ue_link(k, N)) > tol.hz) add("ue_link_last_slot", k, N, b.ue_link(k, N));
    if (std::abs(b.uav_link(k, 1)) > tol.hz) add("uav_link_first_slot", k, 1, b.uav_link(k, 1));
  }

  const double d0 = norm(u.points.front() - cfg.uav_start);
  if (d0 > tol.meters) add("start_point", -1, 0, d0);
  const double dN = norm(u.points.back() - cfg.uav_end);
  if (dN > tol.meters) add("end_point", -1, N, dN);
  const double step = cfg.vmax_mps * cfg.grid().tau;
  for (int n = 1; n <= N; ++n) {
    const double d = norm(u.points[n] - u.points[n - 1]);
    if (d > step + tol.meters) add("max_speed", -1, n, d - step);
  }
  return out;
}

}  // namespace uavmec
