#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "uavmec/alternating.hpp"

namespace uavmec {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

// CSV layouts (UE index k is 1-based in every file):
//   trajectory.csv  n,x,y,speed            n = 0..N, speed of slot n (0 on row 0)
//   energy.csv      n,entity,local_j,offload_j,compute_j,fly_j,total_j
//                   entity is ue<k> or uav; totals over all rows sum to TEC
//   allocation.csv  k,n,local_bits,ue_offload_bits,uav_compute_bits,uav_offload_bits,ue_link_hz,uav_link_hz
//   convergence.csv iteration,tec_j,after_task_j,after_bandwidth_j,after_trajectory_j
std::string trajectory_csv(const Trajectory& u, const ScenarioConfig& cfg);
std::string energy_csv(const EnergyBreakdown& e, const ScenarioConfig& cfg);
std::string allocation_csv(const TaskAllocation& l, const BandwidthAllocation& b);
std::string convergence_csv(const SolveReport& r);

nlohmann::json summary_json(const std::string& scheme, const Solution& s, const ScenarioConfig& cfg,
                            const BlockCertificates* cert);

/// Writes the five output files into dir (created if missing). Each file is
/// written to a temporary name and renamed into place.
void write_run(const std::filesystem::path& dir, const std::string& scheme, const Solution& s,
               const ScenarioConfig& cfg, const BlockCertificates* cert);

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

Trajectory read_trajectory_csv(const std::filesystem::path& path);
std::pair<TaskAllocation, BandwidthAllocation> read_allocation_csv(const std::filesystem::path& path, int ues,
                                                                   int slots);

}  // namespace uavmec
