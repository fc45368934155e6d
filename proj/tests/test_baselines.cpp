#include <gtest/gtest.h>

#include "test_util.hpp"
#include "uavmec/baselines.hpp"

using namespace uavmec;

TEST(Baselines, NamesRoundTrip) {
  EXPECT_EQ(all_baselines().size(), 4u);
  for (BaselineKind k : all_baselines()) EXPECT_EQ(parse_baseline(to_string(k)), k);
  EXPECT_FALSE(parse_baseline("proposed").has_value());
}

TEST(Baselines, LocalComputingClosedForm) {
  const auto cfg = ScenarioConfig::reference();
  const auto s = run_baseline(BaselineKind::kLocalComputing, cfg);
  EXPECT_NEAR(s.report.energy.ue_total(), 2.56e5, 1e-6);
  EXPECT_NEAR(s.report.energy.fly_total(), 159.8214, 1e-9);
  EXPECT_TRUE(kLocalComputingIncludesFly);
  EXPECT_NEAR(s.report.energy.tec, 2.56e5 + 159.8214, 1e-6);
  EXPECT_TRUE(s.report.violations.empty());
}

TEST(Baselines, UniformLocalSplitIsOptimal) {
  // Moving any amount between two slots raises cubic energy.
  const auto cfg = ScenarioConfig::reference();
  const auto g = cfg.grid();
  const double per = 4e8 / cfg.slots;
  for (double d : {1.0, 1e3, 1e6}) {
    EXPECT_GT(local_energy(per + d, cfg.ues[0], g) + local_energy(per - d, cfg.ues[0], g),
              2 * local_energy(per, cfg.ues[0], g));
  }
}

TEST(Baselines, RestrictedSchemesRespectTheirRestriction) {
  const auto cfg = ScenarioConfig::reference();
  const auto direct = run_baseline(BaselineKind::kDirectTrajectory, cfg);
  EXPECT_EQ(direct.trajectory, Trajectory::straight_line(cfg));
  const auto off = run_baseline(BaselineKind::kOffloadingOnly, cfg);
  EXPECT_EQ(off.tasks.local.sum(), 0.0);
  const auto eq = run_baseline(BaselineKind::kEqualBandwidth, cfg);
  EXPECT_EQ(eq.bandwidth, BandwidthAllocation::equal_split(cfg));
  for (const auto* s : {&direct, &off, &eq}) EXPECT_TRUE(s->report.violations.empty());
}

TEST(Baselines, ProposedDominatesOnReferenceScenario) {
  const auto cfg = ScenarioConfig::reference();
  const double proposed = solve(cfg).report.energy.tec;
  for (BaselineKind k : all_baselines()) {
    EXPECT_LE(proposed, run_baseline(k, cfg).report.energy.tec * (1 + 1e-6)) << to_string(k);
  }
}
