#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "uavmec/alternating.hpp"

using namespace uavmec;
using uavmec::testing::rel_diff;

namespace {

void expect_monotone(const SolveReport& r) {
  for (std::size_t i = 1; i < r.tec_trace.size(); ++i) {
    EXPECT_LE(r.tec_trace[i], r.tec_trace[i - 1] * (1 + 1e-9));
  }
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    const auto& b = r.blocks[i];
    EXPECT_LE(b.after_bandwidth, b.after_task);
    EXPECT_LE(b.after_trajectory, b.after_bandwidth);
    if (i > 0) EXPECT_LE(b.after_task, r.tec_trace[i - 1]);
  }
}

// Joint brute force for one UE and three slots: both free waypoints on a
// grid, bits on a grid of I/M, slot-2 bandwidth split on a grid of B/S.
double joint_oracle(const ScenarioConfig& cfg, int M, int S, double span, int W) {
  const TimeGrid g = cfg.grid();
  const UeSpec& ue = cfg.ues[0];
  const double q = ue.input_bits / M;
  const double B = cfg.bandwidth_hz;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto link = [&](int bits, double bw, double h) {
    if (bits == 0) return 0.0;
    return bw > 0 ? ue_offload_energy(bits * q, bw, h, cfg, g) : inf;
  };
  std::vector<double> local3(M + 1, inf), uavc(M + 1);
  for (int a = 0; a <= M; ++a)
    for (int b = 0; a + b <= M; ++b)
      for (int c = 0; a + b + c <= M; ++c)
        local3[a + b + c] = std::min(local3[a + b + c], local_energy(a * q, ue, g) + local_energy(b * q, ue, g) +
                                                             local_energy(c * q, ue, g));
  for (int c = 0; c <= M; ++c) uavc[c] = uav_compute_energy(c * q, ue, cfg, g);

  const Trajectory line = Trajectory::straight_line(cfg);
  double best = inf;
  std::vector<double> e2((M + 1) * (M + 1)), relay3(M + 1);
  for (int i1 = 0; i1 < W * W; ++i1) {
    const Vec2 u1 = line.points[1] + Vec2{span * (i1 % W) / (W - 1) - span / 2, span * (i1 / W) / (W - 1) - span / 2};
    const double fly1 = fly_energy(norm(u1 - line.points[0]) / g.tau, cfg, g);
    const double h1 = channel_gain_ue(0, u1, cfg);
    for (int i2 = 0; i2 < W * W; ++i2) {
      const Vec2 u2 =
          line.points[2] + Vec2{span * (i2 % W) / (W - 1) - span / 2, span * (i2 / W) / (W - 1) - span / 2};
      const double fly = fly1 + fly_energy(norm(u2 - u1) / g.tau, cfg, g) +
                         fly_energy(norm(line.points[3] - u2) / g.tau, cfg, g);
      if (!(fly < best)) continue;
      const double h2 = channel_gain_ue(0, u2, cfg), a2 = channel_gain_ap(u2, cfg);
      const double a3 = channel_gain_ap(line.points[3], cfg);
      // slot 2: offload o2 and forward f2 share B.
      for (int o2 = 0; o2 <= M; ++o2) {
        for (int f2 = 0; f2 <= M; ++f2) {
          double e = inf;
          if (o2 == 0 || f2 == 0) {
            e = link(o2, B, h2) + link(f2, B, a2);
          } else {
            for (int s = 1; s < S; ++s) e = std::min(e, link(o2, B * s / S, h2) + link(f2, B * (S - s) / S, a2));
          }
          e2[o2 * (M + 1) + f2] = e;
        }
      }
      for (int r = 0; r <= M; ++r) {
        relay3[r] = inf;
        for (int c = 0; c <= r; ++c) relay3[r] = std::min(relay3[r], uavc[c] + link(r - c, B, a3));
      }
      for (int o1 = 0; o1 <= M; ++o1) {
        const double head = fly + link(o1, B, h1);
        for (int o2 = 0; o1 + o2 <= M; ++o2) {
          const double base = head + local3[M - o1 - o2];
          for (int c2 = 0; c2 <= o1; ++c2) {
            for (int f2 = 0; c2 + f2 <= o1; ++f2) {
              best = std::min(best, base + uavc[c2] + e2[o2 * (M + 1) + f2] + relay3[o1 + o2 - c2 - f2]);
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST(Solve, NoTasksConvergesInOneIteration) {
  auto cfg = ScenarioConfig::reference();
  for (auto& ue : cfg.ues) ue.input_bits = 0.0;
  const auto s = solve(cfg);
  EXPECT_EQ(s.report.outer_iterations, 1);
  EXPECT_TRUE(s.report.converged);
  EXPECT_DOUBLE_EQ(s.report.energy.tec, s.report.energy.fly_total());
  EXPECT_LE(s.report.energy.tec, 159.8214 + 1e-9);
  EXPECT_TRUE(s.report.violations.empty());
}

TEST(Solve, ReferenceScenarioIsMonotoneFeasibleAndCertified) {
  const auto cfg = ScenarioConfig::reference();
  const auto opts = SolveOptions::from_config(cfg);
  const auto s = solve(cfg, opts);
  EXPECT_TRUE(s.report.converged);
  EXPECT_TRUE(s.report.violations.empty());
  expect_monotone(s.report);
  EXPECT_DOUBLE_EQ(s.report.tec_trace.back(), s.report.energy.tec);
  const auto c = certify_blocks(s, cfg, opts);
  EXPECT_LE(c.task.stationarity, 1e-6);
  EXPECT_LE(c.task.complementary_slackness, 1e-6);
  ASSERT_TRUE(c.bandwidth_stationarity.has_value());
  EXPECT_LE(*c.bandwidth_stationarity, 1e-6);
  EXPECT_LE(*c.bandwidth_split_residual, 1e-9);
  EXPECT_LE(c.task_block_change, 10 * cfg.tol_outer);
}

TEST(Solve, RandomScenariosAreMonotoneAndFeasible) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 3; ++i) {
    const auto cfg = uavmec::testing::random_config(rng);
    const auto s = solve(cfg);
    EXPECT_TRUE(s.report.violations.empty());
    expect_monotone(s.report);
  }
}

TEST(Solve, BitIdenticalAcrossRuns) {
  const auto cfg = ScenarioConfig::reference();
  const auto a = solve(cfg);
  const auto b = solve(cfg);
  EXPECT_EQ(a.report.tec_trace, b.report.tec_trace);
  EXPECT_EQ(a.tasks, b.tasks);
  EXPECT_EQ(a.bandwidth, b.bandwidth);
  EXPECT_EQ(a.trajectory, b.trajectory);
}

TEST(Solve, IterationCapIsReported) {
  const auto cfg = ScenarioConfig::reference();
  auto opts = SolveOptions::from_config(cfg);
  opts.max_outer = 1;
  const auto s = solve(cfg, opts);
  EXPECT_EQ(s.report.outer_iterations, 1);
  EXPECT_FALSE(s.report.converged);
  EXPECT_TRUE(s.report.violations.empty());
}

TEST(Solve, InvalidScenarioIsRejectedBeforeSolving) {
  auto cfg = ScenarioConfig::reference();
  cfg.vmax_mps = 0.1;
  EXPECT_THROW(solve(cfg), std::invalid_argument);
}

TEST(Solve, TinyInstanceNoWorseThanJointGridSearch) {
  auto cfg = uavmec::testing::tiny_config(1e8);
  cfg.ues[0].position = {0.0, 5.0};
  cfg.noise_w = 1e-3;
  const auto s = solve(cfg);
  ASSERT_TRUE(s.report.violations.empty());
  const double oracle = joint_oracle(cfg, 30, 20, 16.0, 9);
  EXPECT_LE(s.report.energy.tec, oracle * 1.01) << "oracle " << oracle;
}
