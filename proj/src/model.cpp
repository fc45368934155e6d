#include "uavmec/model.hpp"

#include <numbers>
#include <numeric>
#include <sstream>

namespace uavmec {

namespace {

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << field << ": must be finite and > 0 (got " << v << ")";
    throw std::invalid_argument(os.str());
  }
}

void require_finite(const Vec2& p, const std::string& field) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument(field + ": coordinates must be finite");
  }
}

double transmit_energy(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                       const TimeGrid& grid) {
  if (bits < 0.0) throw std::invalid_argument("offload bits must be >= 0");
  if (bits == 0.0) return 0.0;
  if (!(bw_hz > 0.0)) throw InfeasibleAllocation("positive offload bits on a zero-bandwidth link");
  const double rate = bits / (grid.delta * bw_hz);
  return grid.delta * cfg.noise_w / gain * std::expm1(rate * std::numbers::ln2);
}

}  // namespace

TimeGrid ScenarioConfig::grid() const {
  const double tau = horizon_s / slots;
  return {tau, tau / std::max(ue_count(), 1)};
}

void ScenarioConfig::validate() const {
  if (slots < 2) throw std::invalid_argument("slots: must be >= 2");
  if (ues.empty()) throw std::invalid_argument("ues: at least one UE is required");
  require_positive(bandwidth_hz, "bandwidth_hz");
  require_positive(horizon_s, "horizon_s");
  require_positive(ref_gain, "ref_gain");
  require_positive(noise_w, "noise_w");
  require_positive(altitude_m, "altitude_m");
  require_positive(vmax_mps, "vmax_mps");
  require_positive(theta1, "theta1");
  require_positive(theta2, "theta2");
  require_positive(kappa_uav, "kappa_uav");
  require_positive(tol_outer, "tol_outer");
  require_positive(tol_inner, "tol_inner");
  require_finite(ap_position, "ap_position");
  require_finite(uav_start, "uav_start");
  require_finite(uav_end, "uav_end");
  for (std::size_t k = 0; k < ues.size(); ++k) {
    const std::string base = "ues[" + std::to_string(k) + "].";
    require_finite(ues[k].position, base + "position");
    if (!(ues[k].input_bits >= 0.0) || !std::isfinite(ues[k].input_bits)) {
      throw std::invalid_argument(base + "input_bits: must be finite and >= 0");
    }
    require_positive(ues[k].cycles_per_bit, base + "cycles_per_bit");
    require_positive(ues[k].kappa, base + "kappa");
  }
  const double needed = norm(uav_end - uav_start) / horizon_s;
  if (needed > vmax_mps * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "vmax_mps: " << vmax_mps << " m/s cannot reach uav_end from uav_start within the horizon"
       << " (needs " << needed << " m/s)";
    throw std::invalid_argument(os.str());
  }
}

ScenarioConfig ScenarioConfig::reference() {
  ScenarioConfig cfg;
  for (Vec2 p : {Vec2{5, 5}, Vec2{-5, 5}, Vec2{-5, -5}, Vec2{-5, 5}}) {
    cfg.ues.push_back(UeSpec{p, 4e8, 1e3, 1e-28});
  }
  return cfg;
}

double SlotGrid::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double SlotGrid::sum_ue(int k) const {
  double s = 0.0;
  for (int n = 1; n <= slots_; ++n) s += (*this)(k, n);
  return s;
}

double SlotGrid::sum_slot(int n) const {
  double s = 0.0;
  for (int k = 0; k < ues_; ++k) s += (*this)(k, n);
  return s;
}

BandwidthAllocation BandwidthAllocation::equal_split(const ScenarioConfig& cfg) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  BandwidthAllocation b(K, N);
  for (int k = 0; k < K; ++k) {
    for (int n = 1; n <= N; ++n) {
      if (n == 1) {
        b.ue_link(k, n) = cfg.bandwidth_hz;
      } else if (n == N) {
        b.uav_link(k, n) = cfg.bandwidth_hz;
      } else {
        b.ue_link(k, n) = 0.5 * cfg.bandwidth_hz;
        b.uav_link(k, n) = 0.5 * cfg.bandwidth_hz;
      }
    }
  }
  return b;
}

std::vector<double> Trajectory::speeds(double tau) const {
  std::vector<double> v(points.size(), 0.0);
  for (int n = 1; n <= slots(); ++n) v[n] = speed(n, tau);
  return v;
}

Trajectory Trajectory::straight_line(const ScenarioConfig& cfg) {
  Trajectory u;
  u.points.resize(cfg.slots + 1);
  const Vec2 d = cfg.uav_end - cfg.uav_start;
  for (int n = 0; n <= cfg.slots; ++n) {
    u.points[n] = cfg.uav_start + (static_cast<double>(n) / cfg.slots) * d;
  }
  u.points.back() = cfg.uav_end;
  return u;
}

double EnergyBreakdown::uav_total() const {
  return uav_compute.sum() + uav_offload.sum() + fly_total();
}

double EnergyBreakdown::fly_total() const { return std::accumulate(fly.begin(), fly.end(), 0.0); }

double EnergyBreakdown::slot_total(int n) const {
  return fly[n] + local.sum_slot(n) + ue_offload.sum_slot(n) + uav_compute.sum_slot(n) +
         uav_offload.sum_slot(n);
}

double channel_gain(const Vec2& uav, const Vec2& ground, const ScenarioConfig& cfg) {
  return cfg.ref_gain / (squared_norm(uav - ground) + cfg.altitude_m * cfg.altitude_m);
}

double channel_gain_ap(const Vec2& uav, const ScenarioConfig& cfg) {
  return channel_gain(uav, cfg.ap_position, cfg);
}

double channel_gain_ue(int k, const Vec2& uav, const ScenarioConfig& cfg) {
  return channel_gain(uav, cfg.ues.at(k).position, cfg);
}

double local_energy(double bits, const UeSpec& ue, const TimeGrid& grid) {
  if (bits < 0.0) throw std::invalid_argument("local bits must be >= 0");
  const double c = ue.cycles_per_bit;
  return ue.kappa * c * c * c / (grid.tau * grid.tau) * bits * bits * bits;
}

double ue_offload_energy(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                         const TimeGrid& grid) {
  return transmit_energy(bits, bw_hz, gain, cfg, grid);
}

double uav_compute_energy(double bits, const UeSpec& ue, const ScenarioConfig& cfg,
                          const TimeGrid& grid) {
  if (bits < 0.0) throw std::invalid_argument("UAV compute bits must be >= 0");
  const double c = ue.cycles_per_bit;
  return cfg.kappa_uav * c * c * c / (grid.delta * grid.delta) * bits * bits * bits;
}

double uav_offload_energy(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                          const TimeGrid& grid) {
  return transmit_energy(bits, bw_hz, gain, cfg, grid);
}

double fly_energy(double speed, const ScenarioConfig& cfg, const TimeGrid& grid) {
  if (!(speed > 0.0)) throw std::domain_error("fly energy is unbounded at zero speed");
  return grid.tau * (cfg.theta1 * speed * speed * speed + cfg.theta2 / speed);
}

double local_energy_per_bit(double bits, const UeSpec& ue, const TimeGrid& grid) {
  const double c = ue.cycles_per_bit;
  return 3.0 * ue.kappa * c * c * c / (grid.tau * grid.tau) * bits * bits;
}

double uav_compute_energy_per_bit(double bits, const UeSpec& ue, const ScenarioConfig& cfg,
                                  const TimeGrid& grid) {
  const double c = ue.cycles_per_bit;
  return 3.0 * cfg.kappa_uav * c * c * c / (grid.delta * grid.delta) * bits * bits;
}

double link_energy_per_bit(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                           const TimeGrid& grid) {
  const double ln2 = std::numbers::ln2;
  return cfg.noise_w * ln2 / (gain * bw_hz) * std::exp2(bits / (grid.delta * bw_hz));
}

double link_energy_per_hz(double bits, double bw_hz, double gain, const ScenarioConfig& cfg,
                          const TimeGrid& grid) {
  const double ln2 = std::numbers::ln2;
  return -cfg.noise_w * ln2 * bits / (gain * bw_hz * bw_hz) * std::exp2(bits / (grid.delta * bw_hz));
}

EnergyBreakdown total_energy(const TaskAllocation& l, const BandwidthAllocation& b,
                             const Trajectory& u, const ScenarioConfig& cfg) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  if (u.slots() != N || l.local.slots() != N || b.ue_link.slots() != N || l.local.ues() != K) {
    throw std::invalid_argument("total_energy: allocation shape does not match the scenario");
  }
  const TimeGrid grid = cfg.grid();
  EnergyBreakdown e{SlotGrid(K, N), SlotGrid(K, N), SlotGrid(K, N), SlotGrid(K, N),
                    std::vector<double>(N + 1, 0.0), 0.0};
  for (int n = 1; n <= N; ++n) {
    const Vec2& p = u.points[n];
    const double h_ap = channel_gain_ap(p, cfg);
    e.fly[n] = fly_energy(u.speed(n, grid.tau), cfg, grid);
    for (int k = 0; k < K; ++k) {
      const UeSpec& ue = cfg.ues[k];
      e.local(k, n) = local_energy(l.local(k, n), ue, grid);
      e.ue_offload(k, n) =
          ue_offload_energy(l.ue_offload(k, n), b.ue_link(k, n), channel_gain_ue(k, p, cfg), cfg, grid);
      e.uav_compute(k, n) = uav_compute_energy(l.uav_compute(k, n), ue, cfg, grid);
      e.uav_offload(k, n) = uav_offload_energy(l.uav_offload(k, n), b.uav_link(k, n), h_ap, cfg, grid);
    }
  }
  double tec = 0.0;
  for (int n = 1; n <= N; ++n) tec += e.slot_total(n);
  e.tec = tec;
  return e;
}

}  // namespace uavmec
