#pragma once

#include <utility>

#include "uavmec/model.hpp"

namespace uavmec {

/// Duals of the per-(UE, slot) split constraint. Zero for idle slots.
struct BandwidthDuals {
  SlotGrid nu;
};

struct BandwidthReport {
  int active_pairs = 0;     // both links carry bits
  int exclusive_pairs = 0;  // exactly one link carries bits
  int idle_pairs = 0;
  double max_split_residual = 0.0;  // |b_ue + b_uav - B| / B over active pairs
  double max_stationarity = 0.0;    // |nu + dE/db| / nu over carrying links
  double energy = 0.0;              // transmit energy of the returned split
};

struct BandwidthSolution {
  BandwidthAllocation allocation;
  BandwidthDuals duals;
  BandwidthReport report;
};

/// Bandwidth minimizing one link's Lagrangian at split price nu:
/// b = (ln2/2) bits / (delta W0((ln2/2) sqrt(Gamma))), Gamma = nu h bits / (delta^2 N0 ln2).
/// Zero when the link carries no bits.
double link_bandwidth_from_dual(double nu, double bits, double gain, const ScenarioConfig& cfg,
                                const TimeGrid& grid);

/// Both links of one (UE, slot) pair at price nu.
std::pair<double, double> band_from_dual(double nu, double ue_bits, double uav_bits, double ue_gain,
                                         double ap_gain, const ScenarioConfig& cfg, const TimeGrid& grid);

struct SlotSplit {
  double ue_link = 0.0;
  double uav_link = 0.0;
  double nu = 0.0;
};

/// Energy-optimal split of B between the two links of one (UE, slot) pair.
SlotSplit split_slot(double ue_bits, double uav_bits, double ue_gain, double ap_gain,
                     const ScenarioConfig& cfg, const TimeGrid& grid);

BandwidthSolution solve_bandwidth(const TaskAllocation& l, const Trajectory& u, const ScenarioConfig& cfg);

}  // namespace uavmec
