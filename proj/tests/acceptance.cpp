// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "uavmec/alternating.hpp"
#include "uavmec/bandwidth.hpp"
#include "uavmec/baselines.hpp"
#include "uavmec/lambert_w.hpp"
#include "uavmec/results_io.hpp"
#include "uavmec/task_allocation.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + 1e-9 * std::abs(v[i - 1])) return false;
  }
  return true;
}

ScenarioConfig with_bits(ScenarioConfig cfg, double bits) {
  for (UeSpec& ue : cfg.ues) ue.input_bits = bits;
  return cfg;
}

void task_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = uavmec::testing::tiny_config(1000.0);
  const auto b = BandwidthAllocation::equal_split(cfg);
  const auto u = Trajectory::straight_line(cfg);
  const auto s = solve_task_allocation(b, u, cfg);
  const double got = task_objective(s.allocation, b, u, cfg);
  const double oracle = uavmec::testing::task_grid_oracle(cfg, b, u, 10.0);
  const double fly = total_energy(s.allocation, b, u, cfg).fly_total();
  // Compared without the common propulsion term, which would hide any gap.
  const double rel = std::abs(got - oracle) / oracle;
  const double t = seconds_since(t0);
  report(1, rel <= 0.01 && t < 60, "task block vs 10-bit grid search",
         fmt("compute+transmit rel diff %.3g, TEC rel diff %.3g, %.2f s", rel,
             std::abs(got - oracle) / (oracle + fly), t));
}

void bandwidth_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = ScenarioConfig::reference();
  const TimeGrid g = cfg.grid();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_bits(5.0, 7.0), pos(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double l_ue = std::pow(10.0, log_bits(rng)), l_uav = std::pow(10.0, log_bits(rng));
    const Vec2 uav{pos(rng), pos(rng)}, ue{pos(rng), pos(rng)};
    const double h_ue = channel_gain(uav, ue, cfg), h_ap = channel_gain_ap(uav, cfg);
    const SlotSplit sp = split_slot(l_ue, l_uav, h_ue, h_ap, cfg, g);
    const double got =
        ue_offload_energy(l_ue, sp.ue_link, h_ue, cfg, g) + uav_offload_energy(l_uav, sp.uav_link, h_ap, cfg, g);
    const double oracle = uavmec::testing::bandwidth_grid_oracle(l_ue, l_uav, h_ue, h_ap, cfg, 1e3);
    worst = std::max(worst, std::abs(got - oracle) / oracle);
  }
  const double t = seconds_since(t0);
  report(2, worst <= 1e-3 && t < 60, "bandwidth split vs 1 kHz grid search, 20 tuples",
         fmt("worst rel diff %.3g, %.2f s", worst, t));
}

void lambert() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, -12.0 + 24.0 * i / 999.0);
    const double w = lambert_w0(x).w;
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / x);
  }
  const double at_e = std::abs(lambert_w0(std::exp(1.0)).w - 1.0);
  report(3, worst <= 1e-12 && at_e <= 1e-14, "Lambert W0 residual on [1e-12, 1e12]",
         fmt("worst residual %.3g, |W0(e)-1| %.3g", worst, at_e));
}

void kkt(const Solution& s, const ScenarioConfig& cfg) {
  const auto c = certify_blocks(s, cfg, SolveOptions::from_config(cfg));
  const double bw = c.bandwidth_stationarity.value_or(INFINITY);
  const double split = c.bandwidth_split_residual.value_or(INFINITY);
  const double worst = std::max({c.task.complementary_slackness, c.task.stationarity, bw, split});
  report(4, s.report.converged && worst <= 1e-6, "KKT residuals of both convex blocks at convergence",
         fmt("task cs %.3g stat %.3g, bandwidth stat %.3g", c.task.complementary_slackness, c.task.stationarity, bw) +
             fmt(", split %.3g", split));
}

void descent(const Solution& reference) {
  std::vector<Solution> runs{reference};
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10; ++i) runs.push_back(solve(uavmec::testing::random_config(rng)));
  int bad_outer = 0, bad_sca = 0, passes = 0;
  for (const Solution& s : runs) {
    if (!non_increasing(s.report.tec_trace)) ++bad_outer;
    for (const auto& tr : s.report.sca_traces) {
      ++passes;
      if (!non_increasing(tr)) ++bad_sca;
    }
  }
  report(5, bad_outer == 0 && bad_sca == 0, "monotone TEC and SCA traces, reference + 10 random scenarios",
         fmt("%g outer traces and %g of %g SCA passes increased", bad_outer, bad_sca, passes));
}

std::vector<Solution> all_outputs;

void dominance(const Solution& reference, const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = reference.report.energy.tec;
  bool ok = true;
  std::string detail = fmt("proposed %.4f J", p);
  double local400 = 0.0;
  for (BaselineKind k : all_baselines()) {
    const Solution b = run_baseline(k, cfg);
    all_outputs.push_back(b);
    ok = ok && p <= b.report.energy.tec;
    detail += ", " + std::string(to_string(k)) + fmt(" %.4f", b.report.energy.tec);
    if (k == BaselineKind::kLocalComputing) local400 = b.report.energy.tec;
  }
  const auto cfg500 = with_bits(cfg, 5e8);
  const Solution p500 = solve(cfg500);
  const Solution off500 = run_baseline(BaselineKind::kOffloadingOnly, cfg500);
  all_outputs.push_back(p500);
  all_outputs.push_back(off500);
  const double half = p500.report.energy.tec / off500.report.energy.tec;
  const double thousandth = p / local400;
  ok = ok && half <= 0.5 && thousandth <= 0.01;
  const double t = seconds_since(t0);
  report(6, ok && t < 600, "proposed dominates all baselines",
         detail + fmt("; 500 Mbit ratio to offloading_only %.4f, ratio to local_computing %.5f, %.1f s", half,
                      thousandth, t));
}

void trends(const ScenarioConfig& cfg) {
  std::vector<double> by_bits, by_time;
  for (double mb : {300.0, 400.0, 500.0}) {
    all_outputs.push_back(solve(with_bits(cfg, mb * 1e6)));
    by_bits.push_back(all_outputs.back().report.energy.tec);
  }
  for (double T : {8.0, 10.0, 12.0}) {
    ScenarioConfig c = cfg;
    c.horizon_s = T;
    all_outputs.push_back(solve(c));
    by_time.push_back(all_outputs.back().report.energy.tec);
  }
  const bool ok = by_bits[0] < by_bits[1] && by_bits[1] < by_bits[2] && by_time[0] > by_time[1] &&
                  by_time[1] > by_time[2];
  report(7, ok, "TEC increases with task size and decreases with completion time",
         fmt("I=300/400/500 Mbit: %.3f/%.3f/%.3f J", by_bits[0], by_bits[1], by_bits[2]) +
             fmt("; T=8/10/12 s: %.3f/%.3f/%.3f J", by_time[0], by_time[1], by_time[2]));
}

double min_distance(const Trajectory& u, const Vec2& p) {
  double d = INFINITY;
  for (std::size_t n = 1; n < u.points.size(); ++n) d = std::min(d, norm(u.points[n] - p));
  return d;
}

void trajectory_shape(const ScenarioConfig& cfg) {
  ScenarioConfig skewed = cfg;
  const double mb[] = {600, 200, 400, 200};
  for (int k = 0; k < 4; ++k) skewed.ues[k].input_bits = mb[k] * 1e6;
  const Solution a = solve(skewed);
  const Solution b = solve(with_bits(cfg, 4e8));
  all_outputs.push_back(a);
  const double da = min_distance(a.trajectory, cfg.ues[0].position);
  const double db = min_distance(b.trajectory, cfg.ues[0].position);
  report(8, da < db, "trajectory moves toward the UE with the largest task",
         fmt("min distance to UE 1: %.4f m skewed vs %.4f m uniform", da, db));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void feasibility(const Solution& reference, const ScenarioConfig& cfg) {
  all_outputs.push_back(reference);
  std::size_t violations = 0;
  for (const Solution& s : all_outputs) violations += s.report.violations.size();

  const fs::path dir = fs::temp_directory_path() / "uavmec_acceptance_golden";
  fs::remove_all(dir);
  write_run(dir, "proposed", reference, cfg, nullptr);
  int mismatched = 0;
  for (const char* f : {"trajectory.csv", "energy.csv", "allocation.csv", "convergence.csv"}) {
    const fs::path g = fs::path(UAVMEC_GOLDEN_DIR) / "reference" / f;
    if (!fs::exists(g) || slurp(g) != slurp(dir / f)) ++mismatched;
  }
  fs::remove_all(dir);
  report(9, violations == 0 && mismatched == 0, "feasibility of every output and golden CSVs",
         fmt("%g outputs, %g violations, %g of 4 golden files differ", static_cast<double>(all_outputs.size()),
             static_cast<double>(violations), mismatched));
}

}  // namespace

int main() {
  const ScenarioConfig cfg = ScenarioConfig::reference();
  task_oracle();
  bandwidth_oracle();
  lambert();
  const Solution reference = solve(cfg);
  kkt(reference, cfg);
  descent(reference);
  dominance(reference, cfg);
  trends(cfg);
  trajectory_shape(cfg);
  feasibility(reference, cfg);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
