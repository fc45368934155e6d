#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "uavmec/bandwidth.hpp"
#include "uavmec/task_allocation.hpp"

using namespace uavmec;
using uavmec::testing::rel_diff;

namespace {

double pair_energy(double l1, double b1, double h1, double l2, double b2, double h2, const ScenarioConfig& cfg) {
  const TimeGrid g = cfg.grid();
  return ue_offload_energy(l1, b1, h1, cfg, g) + uav_offload_energy(l2, b2, h2, cfg, g);
}

}  // namespace

TEST(BandFromDual, ZeroBitsGetZeroBandwidth) {
  const auto cfg = ScenarioConfig::reference();
  const auto [a, b] = band_from_dual(1e-12, 0.0, 1e5, 1e-5, 8e-6, cfg, cfg.grid());
  EXPECT_EQ(a, 0.0);
  EXPECT_GT(b, 0.0);
}

TEST(BandFromDual, StrictlyDecreasingInPrice) {
  const auto cfg = ScenarioConfig::reference();
  double prev = std::numeric_limits<double>::infinity();
  for (double nu = 1e-16; nu < 1e-6; nu *= 2) {
    const double b = link_bandwidth_from_dual(nu, 1e5, 1e-5, cfg, cfg.grid());
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(SplitSlot, ExclusiveLinkTakesAllOfB) {
  const auto cfg = ScenarioConfig::reference();
  const auto s = split_slot(0.0, 1e5, 1e-5, 8e-6, cfg, cfg.grid());
  EXPECT_EQ(s.ue_link, 0.0);
  EXPECT_EQ(s.uav_link, cfg.bandwidth_hz);
  const auto t = split_slot(1e5, 0.0, 1e-5, 8e-6, cfg, cfg.grid());
  EXPECT_EQ(t.ue_link, cfg.bandwidth_hz);
  EXPECT_EQ(t.uav_link, 0.0);
  const auto idle = split_slot(0.0, 0.0, 1e-5, 8e-6, cfg, cfg.grid());
  EXPECT_EQ(idle.ue_link + idle.uav_link, 0.0);
}

TEST(SplitSlot, SymmetricLinksSplitEvenly) {
  const auto cfg = ScenarioConfig::reference();
  const auto s = split_slot(3e5, 3e5, 7e-6, 7e-6, cfg, cfg.grid());
  EXPECT_NEAR(s.ue_link, 0.5 * cfg.bandwidth_hz, 1e-6);
  EXPECT_NEAR(s.uav_link, 0.5 * cfg.bandwidth_hz, 1e-6);
}

TEST(SplitSlot, MatchesKilohertzGridSearch) {
  const auto cfg = ScenarioConfig::reference();
  const auto s = split_slot(1e5, 1e5, 1e-5, 8e-6, cfg, cfg.grid());
  const double got = pair_energy(1e5, s.ue_link, 1e-5, 1e5, s.uav_link, 8e-6, cfg);
  const double oracle = uavmec::testing::bandwidth_grid_oracle(1e5, 1e5, 1e-5, 8e-6, cfg, 1e3);
  EXPECT_LE(rel_diff(got, oracle), 1e-3);
  EXPECT_LE(got, oracle * (1 + 1e-12));
}

TEST(SplitSlot, KktAndReconstructionIdentity) {
  const auto cfg = ScenarioConfig::reference();
  const TimeGrid g = cfg.grid();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> bits(1e3, 2e6), gain(2e-6, 1e-5);
  for (int i = 0; i < 200; ++i) {
    const double l1 = bits(rng), l2 = bits(rng), h1 = gain(rng), h2 = gain(rng);
    const auto s = split_slot(l1, l2, h1, h2, cfg, g);
    EXPECT_NEAR(s.ue_link + s.uav_link, cfg.bandwidth_hz, 1e-9 * cfg.bandwidth_hz);
    for (const auto& [l, b, h] : {std::tuple{l1, s.ue_link, h1}, std::tuple{l2, s.uav_link, h2}}) {
      EXPECT_LE(std::abs(s.nu + link_energy_per_hz(l, b, h, cfg, g)) / s.nu, 1e-8);
      const double xi = l / (b * g.delta);
      const double gamma = s.nu * h * l / (g.delta * g.delta * cfg.noise_w * std::log(2.0));
      EXPECT_LE(rel_diff(xi * xi * std::exp2(xi), gamma), 1e-9);
    }
  }
}

TEST(SplitSlot, DominatesRandomSplits) {
  const auto cfg = ScenarioConfig::reference();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> frac(1e-6, 1 - 1e-6);
  for (const auto& [l1, l2, h1, h2] : {std::tuple{1e5, 1e5, 1e-5, 8e-6}, std::tuple{2e6, 4e5, 3e-6, 9e-6},
                                       std::tuple{5e4, 1.5e6, 1e-5, 2e-6}}) {
    const auto s = split_slot(l1, l2, h1, h2, cfg, cfg.grid());
    const double best = pair_energy(l1, s.ue_link, h1, l2, s.uav_link, h2, cfg);
    for (int i = 0; i < 2000; ++i) {
      const double b = frac(rng) * cfg.bandwidth_hz;
      EXPECT_LE(best, pair_energy(l1, b, h1, l2, cfg.bandwidth_hz - b, h2, cfg) * (1 + 1e-12));
    }
  }
}

TEST(SplitSlot, ScalingBitsMovesSplitContinuously) {
  const auto cfg = ScenarioConfig::reference();
  double prev = -1;
  for (double s = 1.0; s <= 2.0; s += 0.01) {
    const auto sp = split_slot(1e5 * s, 3e5 * s, 1e-5, 8e-6, cfg, cfg.grid());
    EXPECT_NEAR(sp.ue_link + sp.uav_link, cfg.bandwidth_hz, 1e-9 * cfg.bandwidth_hz);
    if (prev >= 0) EXPECT_LT(std::abs(sp.ue_link - prev), 0.01 * cfg.bandwidth_hz);
    prev = sp.ue_link;
  }
}

TEST(SolveBandwidth, IdleScenarioAssignsNothing) {
  const auto cfg = ScenarioConfig::reference();
  const auto sol = solve_bandwidth(TaskAllocation(cfg.ue_count(), cfg.slots), Trajectory::straight_line(cfg), cfg);
  EXPECT_EQ(sol.allocation.ue_link.sum() + sol.allocation.uav_link.sum(), 0.0);
  EXPECT_EQ(sol.report.idle_pairs, cfg.ue_count() * cfg.slots);
  EXPECT_EQ(sol.report.energy, 0.0);
}

TEST(SolveBandwidth, LowersEnergyOfTaskBlockOutputAndStaysFeasible) {
  const auto cfg = ScenarioConfig::reference();
  const auto u = Trajectory::straight_line(cfg);
  const auto b0 = BandwidthAllocation::equal_split(cfg);
  const auto ts = solve_task_allocation(b0, u, cfg);
  const auto bs = solve_bandwidth(ts.allocation, u, cfg);
  EXPECT_LE(total_energy(ts.allocation, bs.allocation, u, cfg).tec, total_energy(ts.allocation, b0, u, cfg).tec);
  EXPECT_TRUE(check_feasibility(ts.allocation, bs.allocation, u, cfg).empty());
  EXPECT_LE(bs.report.max_stationarity, 1e-8);
  EXPECT_LE(bs.report.max_split_residual, 1e-9);
  EXPECT_GT(bs.report.active_pairs, 0);
  for (int k = 0; k < cfg.ue_count(); ++k) {
    EXPECT_EQ(bs.allocation.ue_link(k, cfg.slots), 0.0);
    EXPECT_EQ(bs.allocation.uav_link(k, 1), 0.0);
  }
}
