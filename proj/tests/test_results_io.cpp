#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "uavmec/results_io.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("uavmec_io_" + name);
  fs::remove_all(d);
  return d;
}

const Solution& reference_solution() {
  static const Solution s = solve(ScenarioConfig::reference());
  return s;
}

// Sum of total_j over energy.csv.
double csv_total(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  double sum = 0.0;
  while (std::getline(in, line)) sum += std::stod(line.substr(line.rfind(',') + 1));
  return sum;
}

}  // namespace

TEST(ResultsIo, FormatDoubleRoundTrips) {
  for (double v : {0.0, 1.0 / 3.0, 155.86770012345678, 1e-300, -2.5e17}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(ResultsIo, FilesReadBackToAFeasibleSolutionWithTheSameTec) {
  const auto cfg = ScenarioConfig::reference();
  const Solution& s = reference_solution();
  const fs::path dir = scratch("roundtrip");
  write_run(dir, "proposed", s, cfg, nullptr);
  for (const char* f : {"trajectory.csv", "energy.csv", "allocation.csv", "convergence.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }

  const Trajectory u = read_trajectory_csv(dir / "trajectory.csv");
  const auto [l, b] = read_allocation_csv(dir / "allocation.csv", cfg.ue_count(), cfg.slots);
  EXPECT_EQ(u, s.trajectory);
  EXPECT_EQ(l, s.tasks);
  EXPECT_EQ(b, s.bandwidth);
  EXPECT_TRUE(check_feasibility(l, b, u, cfg).empty());

  const double recomputed = total_energy(l, b, u, cfg).tec;
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_LE(uavmec::testing::rel_diff(summary["tec_j"].get<double>(), recomputed), 1e-9);
  EXPECT_LE(uavmec::testing::rel_diff(csv_total(dir / "energy.csv"), recomputed), 1e-9);
  EXPECT_EQ(summary["scheme"], "proposed");
  EXPECT_TRUE(summary["violations"].empty());
  EXPECT_FALSE(summary.contains("residuals"));
  fs::remove_all(dir);
}

TEST(ResultsIo, SummaryCarriesResidualsWhenCertified) {
  const auto cfg = ScenarioConfig::reference();
  const auto opts = SolveOptions::from_config(cfg);
  const auto cert = certify_blocks(reference_solution(), cfg, opts);
  const auto j = summary_json("proposed", reference_solution(), cfg, &cert);
  ASSERT_TRUE(j.contains("residuals"));
  EXPECT_LE(j["residuals"]["task_stationarity"].get<double>(), 1e-6);
}

TEST(ResultsIo, NoTemporaryFilesLeftBehind) {
  const fs::path dir = scratch("atomic");
  write_run(dir, "proposed", reference_solution(), ScenarioConfig::reference(), nullptr);
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
  fs::remove_all(dir);
}

TEST(ResultsIo, RejectsMalformedCsv) {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  write_file_atomic(dir / "trajectory.csv", "n,x,y,speed\n0,1,oops,0\n");
  EXPECT_THROW(read_trajectory_csv(dir / "trajectory.csv"), std::runtime_error);
  EXPECT_THROW(read_trajectory_csv(dir / "missing.csv"), std::runtime_error);
  fs::remove_all(dir);
}

// Set UAVMEC_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
TEST(ResultsIo, ReferenceRunMatchesGoldenFiles) {
  const auto cfg = ScenarioConfig::reference();
  const fs::path golden = fs::path(UAVMEC_GOLDEN_DIR) / "reference";
  const fs::path dir = scratch("golden");
  write_run(dir, "proposed", reference_solution(), cfg, nullptr);
  const char* update = std::getenv("UAVMEC_UPDATE_GOLDEN");
  for (const char* f : {"trajectory.csv", "energy.csv", "allocation.csv", "convergence.csv"}) {
    if (update && std::string(update) == "1") {
      fs::create_directories(golden);
      fs::copy_file(dir / f, golden / f, fs::copy_options::overwrite_existing);
    }
    ASSERT_TRUE(fs::exists(golden / f)) << f;
    EXPECT_EQ(slurp(dir / f), slurp(golden / f)) << f;
  }
  fs::remove_all(dir);
}
