#include "uavmec/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/toms748_solve.hpp>

#include "uavmec/lambert_w.hpp"

namespace uavmec {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log of the split price at which a link carrying `bits` wants exactly bw_hz.
double log_price_at(double bw_hz, double bits, double gain, const ScenarioConfig& cfg, const TimeGrid& grid) {
  return std::log(cfg.noise_w * kLn2 * bits / (gain * bw_hz * bw_hz)) + bits / (grid.delta * bw_hz) * kLn2;
}

double link_bandwidth_from_log_dual(double log_nu, double bits, double gain, const ScenarioConfig& cfg,
                                    const TimeGrid& grid) {
  if (!(bits > 0.0)) return 0.0;
  const double log_gamma = log_nu + std::log(gain * bits / (grid.delta * grid.delta * cfg.noise_w * kLn2));
  const double arg = 0.5 * kLn2 * std::exp(0.5 * log_gamma);
  if (!std::isfinite(arg)) {
    throw std::runtime_error("bandwidth split: required rate exceeds what finite transmit energy can carry");
  }
  return 0.5 * kLn2 * bits / (grid.delta * lambert_w0(arg).w);
}

}  // namespace

double link_bandwidth_from_dual(double nu, double bits, double gain, const ScenarioConfig& cfg,
                                const TimeGrid& grid) {
  if (!(bits > 0.0)) return 0.0;
  if (!(nu > 0.0)) throw std::invalid_argument("link_bandwidth_from_dual: nu must be > 0 for an active link");
  return link_bandwidth_from_log_dual(std::log(nu), bits, gain, cfg, grid);
}

std::pair<double, double> band_from_dual(double nu, double ue_bits, double uav_bits, double ue_gain,
                                         double ap_gain, const ScenarioConfig& cfg, const TimeGrid& grid) {
  return {link_bandwidth_from_dual(nu, ue_bits, ue_gain, cfg, grid),
          link_bandwidth_from_dual(nu, uav_bits, ap_gain, cfg, grid)};
}

SlotSplit split_slot(double ue_bits, double uav_bits, double ue_gain, double ap_gain, const ScenarioConfig& cfg,
                     const TimeGrid& grid) {
  const double B = cfg.bandwidth_hz;
  const bool ue_on = ue_bits > 0.0;
  const bool uav_on = uav_bits > 0.0;
  if (!ue_on && !uav_on) return {};
  if (ue_on != uav_on) {
    SlotSplit s;
    (ue_on ? s.ue_link : s.uav_link) = B;
    s.nu = -link_energy_per_hz(ue_on ? ue_bits : uav_bits, B, ue_on ? ue_gain : ap_gain, cfg, grid);
    return s;
  }

  // Both active: sum of the two bandwidths is decreasing in nu.
  const double lo0 = std::min(log_price_at(B, ue_bits, ue_gain, cfg, grid), log_price_at(B, uav_bits, ap_gain, cfg, grid));
  const double hi0 =
      std::max(log_price_at(0.5 * B, ue_bits, ue_gain, cfg, grid), log_price_at(0.5 * B, uav_bits, ap_gain, cfg, grid));
  const auto excess = [&](double log_nu) {
    return link_bandwidth_from_log_dual(log_nu, ue_bits, ue_gain, cfg, grid) +
           link_bandwidth_from_log_dual(log_nu, uav_bits, ap_gain, cfg, grid) - B;
  };
  // The root sits on an endpoint when the links are symmetric; rounding can
  // then put both ends on one side, so step outward until they bracket.
  double lo = lo0, hi = hi0;
  double f_lo = excess(lo);
  double f_hi = excess(hi);
  for (double step = 1e-9; f_lo < 0.0 && step < 1.0; step *= 10) f_lo = excess(lo -= step);
  for (double step = 1e-9; f_hi > 0.0 && step < 1.0; step *= 10) f_hi = excess(hi += step);
  double log_nu = lo;
  if (f_lo != 0.0 && f_hi != 0.0 && lo < hi) {
    std::uintmax_t max_iter = 300;
    const auto tol = [](double a, double b) {
      return std::abs(a - b) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1.0});
    };
    const auto r = boost::math::tools::toms748_solve(excess, lo, hi, f_lo, f_hi, tol, max_iter);
    log_nu = 0.5 * (r.first + r.second);
  } else if (f_hi == 0.0) {
    log_nu = hi;
  }
  SlotSplit s;
  s.ue_link = link_bandwidth_from_log_dual(log_nu, ue_bits, ue_gain, cfg, grid);
  s.uav_link = link_bandwidth_from_log_dual(log_nu, uav_bits, ap_gain, cfg, grid);
  s.nu = std::exp(log_nu);
  return s;
}

BandwidthSolution solve_bandwidth(const TaskAllocation& l, const Trajectory& u, const ScenarioConfig& cfg) {
  const int K = cfg.ue_count();
  const int N = cfg.slots;
  const TimeGrid grid = cfg.grid();
  BandwidthSolution sol{BandwidthAllocation(K, N), BandwidthDuals{SlotGrid(K, N)}, {}};
  BandwidthReport& rep = sol.report;
  for (int n = 1; n <= N; ++n) {
    const Vec2& p = u.points[n];
    const double h_ap = channel_gain_ap(p, cfg);
    for (int k = 0; k < K; ++k) {
      // The UE link is closed in the last slot and the UAV link in the first.
      const double ue_bits = n < N ? l.ue_offload(k, n) : 0.0;
      const double uav_bits = n > 1 ? l.uav_offload(k, n) : 0.0;
      const double h_k = channel_gain_ue(k, p, cfg);
      const SlotSplit s = split_slot(ue_bits, uav_bits, h_k, h_ap, cfg, grid);
      sol.allocation.ue_link(k, n) = s.ue_link;
      sol.allocation.uav_link(k, n) = s.uav_link;
      sol.duals.nu(k, n) = s.nu;

      const bool ue_on = ue_bits > 0.0;
      const bool uav_on = uav_bits > 0.0;
      if (ue_on && uav_on) {
        ++rep.active_pairs;
        rep.max_split_residual =
            std::max(rep.max_split_residual, std::abs(s.ue_link + s.uav_link - cfg.bandwidth_hz) / cfg.bandwidth_hz);
        for (const auto& [bits, bw, g] : {std::tuple{ue_bits, s.ue_link, h_k}, std::tuple{uav_bits, s.uav_link, h_ap}}) {
          const double r = std::abs(s.nu + link_energy_per_hz(bits, bw, g, cfg, grid)) / s.nu;
          rep.max_stationarity = std::max(rep.max_stationarity, r);
        }
      } else if (ue_on || uav_on) {
        ++rep.exclusive_pairs;
      } else {
        ++rep.idle_pairs;
      }
      rep.energy += ue_offload_energy(ue_bits, s.ue_link, h_k, cfg, grid) +
                    uav_offload_energy(uav_bits, s.uav_link, h_ap, cfg, grid);
    }
  }
  return sol;
}

}  // namespace uavmec
