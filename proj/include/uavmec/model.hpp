#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavmec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double squared_norm(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Thrown when an allocation pairs positive bits with zero bandwidth.
class InfeasibleAllocation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One ground user: horizontal position and task parameters.
struct UeSpec {
  Vec2 position;
  double input_bits = 4e8;      // I_k
  double cycles_per_bit = 1e3;  // C_k
  double kappa = 1e-28;         // effective switched capacitance
};

struct TimeGrid {
  double tau = 0.0;    // slot length T/N
  double delta = 0.0;  // per-UE TDMA share of a slot, tau/K
};

/// Full physical parameterization. All fields are linear-scale SI; dB/dBm
/// conversion happens when a config file is loaded.
struct ScenarioConfig {
  double bandwidth_hz = 20e6;
  double horizon_s = 10.0;
  int slots = 50;
  double ref_gain = 1e-3;    // channel power gain at 1 m
  double noise_w = 1e-9;     // noise power N0
  double altitude_m = 10.0;
  double vmax_mps = 10.0;
  double theta1 = 0.00614;   // propulsion, J s^2 / m^3
  double theta2 = 15.976;    // propulsion, J m / s
  double kappa_uav = 1e-28;
  Vec2 ap_position{0.0, 0.0};
  Vec2 uav_start{-5.0, -5.0};
  Vec2 uav_end{5.0, -5.0};
  std::vector<UeSpec> ues;
  double tol_outer = 1e-4;
  double tol_inner = 1e-4;

  int ue_count() const { return static_cast<int>(ues.size()); }
  TimeGrid grid() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Default simulation scenario: 4 UEs, 400 Mbit tasks, AP at the origin.
  static ScenarioConfig reference();
};

/// Dense K x N table of per-UE per-slot values. UEs are 0-based (k in
/// [0, K)); slots are 1-based (n in [1, N]) to match the slot numbering used
/// by the constraints.
class SlotGrid {
 public:
  SlotGrid() = default;
  SlotGrid(int ues, int slots, double fill = 0.0)
      : ues_(ues), slots_(slots), data_(static_cast<std::size_t>(ues) * slots, fill) {}

  double& operator()(int k, int n) { return data_[index(k, n)]; }
  double operator()(int k, int n) const { return data_[index(k, n)]; }

  int ues() const { return ues_; }
  int slots() const { return slots_; }
  double sum() const;
  double sum_ue(int k) const;
  double sum_slot(int n) const;
  const std::vector<double>& raw() const { return data_; }

  friend bool operator==(const SlotGrid&, const SlotGrid&) = default;

 private:
  std::size_t index(int k, int n) const {
    return static_cast<std::size_t>(k) * slots_ + static_cast<std::size_t>(n - 1);
  }
  int ues_ = 0;
  int slots_ = 0;
  std::vector<double> data_;
};

/// Task bits per UE per slot. CPU frequencies are derived: bits*C/tau on the
/// UE, bits*C/delta on the UAV.
struct TaskAllocation {
  SlotGrid local;        // computed on the UE
  SlotGrid ue_offload;   // UE -> UAV
  SlotGrid uav_compute;  // computed on the UAV
  SlotGrid uav_offload;  // UAV -> AP

  TaskAllocation() = default;
  TaskAllocation(int ues, int slots)
      : local(ues, slots), ue_offload(ues, slots), uav_compute(ues, slots), uav_offload(ues, slots) {}
  friend bool operator==(const TaskAllocation&, const TaskAllocation&) = default;
};

struct BandwidthAllocation {
  SlotGrid ue_link;   // B_k^off[n]
  SlotGrid uav_link;  // B_{U,k}^off[n]

  BandwidthAllocation() = default;
  BandwidthAllocation(int ues, int slots) : ue_link(ues, slots), uav_link(ues, slots) {}

  /// B/2 per link on interior slots; slot 1 gives the UE link all of B and
  /// slot N gives the UAV link all of B.
  static BandwidthAllocation equal_split(const ScenarioConfig& cfg);
  friend bool operator==(const BandwidthAllocation&, const BandwidthAllocation&) = default;
};

/// UAV waypoints u[0..N]; u[0] is the start point and u[n] the position
/// held during slot n.
struct Trajectory {
  std::vector<Vec2> points;

  int slots() const { return static_cast<int>(points.size()) - 1; }
  double speed(int n, double tau) const { return norm(points[n] - points[n - 1]) / tau; }
  std::vector<double> speeds(double tau) const;

  /// Constant-speed straight line from uav_start to uav_end.
  static Trajectory straight_line(const ScenarioConfig& cfg);
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EnergyBreakdown {
  SlotGrid local;
  SlotGrid ue_offload;
  SlotGrid uav_compute;
  SlotGrid uav_offload;
  std::vector<double> fly;  // size N+1, fly[0] unused (0)
  double tec = 0.0;

  double ue_total() const { return local.sum() + ue_offload.sum(); }
  double uav_total() const;
  double fly_total() const;
  double slot_total(int n) const;
};

double channel_gain(const Vec2& uav, const Vec2& ground, const ScenarioConfig& cfg);
double channel_gain_ap(const Vec2& uav, const ScenarioConfig& cfg);
double channel_gain_ue(int k, const Vec2& uav, const ScenarioConfig& cfg);

/// kappa_k C_k^3 / tau^2 * bits^3.
double local_energy(double bits, const UeSpec& ue, const TimeGrid& grid);

/// delta N0 / h * (2^(bits / (delta bw)) - 1). Zero bits cost nothing even on
/// a zero-width link; positive bits on a zero-width link throw
/// InfeasibleAllocation.
double ue_offload_energy(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                         const TimeGrid& grid);
double uav_compute_energy(double bits, const UeSpec& ue, const ScenarioConfig& cfg,
                          const TimeGrid& grid);
double uav_offload_energy(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                          const TimeGrid& grid);

/// tau (theta1 v^3 + theta2 / v). Throws std::domain_error for v <= 0.
double fly_energy(double speed, const ScenarioConfig& cfg, const TimeGrid& grid);

// Derivatives of the per-slot energies, used by KKT checks.
double local_energy_per_bit(double bits, const UeSpec& ue, const TimeGrid& grid);
double uav_compute_energy_per_bit(double bits, const UeSpec& ue, const ScenarioConfig& cfg,
                                  const TimeGrid& grid);
double link_energy_per_bit(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                           const TimeGrid& grid);
double link_energy_per_hz(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                          const TimeGrid& grid);

EnergyBreakdown total_energy(const TaskAllocation& l, const BandwidthAllocation& b,
                             const Trajectory& u, const ScenarioConfig& cfg);

struct Violation {
  std::string constraint;
  int ue = -1;    // 0-based, -1 when not UE specific
  int slot = -1;  // 1-based, -1 when not slot specific
  double excess = 0.0;
};

struct FeasibilityTolerances {
  double bits = 0.0;
  double hz = 1.0;
  double meters = 1e-6;

  static FeasibilityTolerances defaults(const ScenarioConfig& cfg);
};

/// Empty iff every task, relay, bandwidth and trajectory constraint holds
/// within tolerance.
std::vector<Violation> check_feasibility(const TaskAllocation& l, const BandwidthAllocation& b,
                                         const Trajectory& u, const ScenarioConfig& cfg,
                                         const FeasibilityTolerances& tol);
std::vector<Violation> check_feasibility(const TaskAllocation& l, const BandwidthAllocation& b,
                                         const Trajectory& u, const ScenarioConfig& cfg);

}  // namespace uavmec
