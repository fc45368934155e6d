#include "uavmec/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"

namespace uavmec {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class CsvWriter {
 public:
  explicit CsvWriter(const char* header) { out_ << header << '\n'; }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::ostringstream out_;
};

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error(path.string() + ": unexpected header, want " + header);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("bad number in CSV: " + s);
  return v;
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

constexpr const char* kTrajectoryHeader = "n,x,y,speed";
constexpr const char* kEnergyHeader = "n,entity,local_j,offload_j,compute_j,fly_j,total_j";
constexpr const char* kAllocationHeader =
    "k,n,local_bits,ue_offload_bits,uav_compute_bits,uav_offload_bits,ue_link_hz,uav_link_hz";
constexpr const char* kConvergenceHeader = "iteration,tec_j,after_task_j,after_bandwidth_j,after_trajectory_j";

}  // namespace

std::string trajectory_csv(const Trajectory& u, const ScenarioConfig& cfg) {
  const double tau = cfg.grid().tau;
  CsvWriter w(kTrajectoryHeader);
  for (int n = 0; n <= u.slots(); ++n) {
    w.row(n, u.points[n].x, u.points[n].y, n == 0 ? 0.0 : u.speed(n, tau));
  }
  return w.str();
}

std::string energy_csv(const EnergyBreakdown& e, const ScenarioConfig& cfg) {
  CsvWriter w(kEnergyHeader);
  const int K = cfg.ue_count();
  for (int n = 1; n <= cfg.slots; ++n) {
    double uav_off = 0.0;
    double uav_cmp = 0.0;
    for (int k = 0; k < K; ++k) {
      const double loc = e.local(k, n);
      const double off = e.ue_offload(k, n);
      w.row(n, "ue" + std::to_string(k + 1), loc, off, 0.0, 0.0, loc + off);
      uav_off += e.uav_offload(k, n);
      uav_cmp += e.uav_compute(k, n);
    }
    w.row(n, std::string("uav"), 0.0, uav_off, uav_cmp, e.fly[n], uav_off + uav_cmp + e.fly[n]);
  }
  return w.str();
}

std::string allocation_csv(const TaskAllocation& l, const BandwidthAllocation& b) {
  CsvWriter w(kAllocationHeader);
  for (int k = 0; k < l.local.ues(); ++k) {
    for (int n = 1; n <= l.local.slots(); ++n) {
      w.row(k + 1, n, l.local(k, n), l.ue_offload(k, n), l.uav_compute(k, n), l.uav_offload(k, n),
            b.ue_link(k, n), b.uav_link(k, n));
    }
  }
  return w.str();
}

std::string convergence_csv(const SolveReport& r) {
  CsvWriter w(kConvergenceHeader);
  for (std::size_t i = 0; i < r.tec_trace.size(); ++i) {
    const BlockTrace& bt = r.blocks[i];
    w.row(static_cast<int>(i + 1), r.tec_trace[i], bt.after_task, bt.after_bandwidth, bt.after_trajectory);
  }
  return w.str();
}

json summary_json(const std::string& scheme, const Solution& s, const ScenarioConfig& cfg,
                  const BlockCertificates* cert) {
  const EnergyBreakdown& e = s.report.energy;
  json per_ue = json::array();
  for (int k = 0; k < cfg.ue_count(); ++k) {
    per_ue.push_back({{"k", k + 1},
                      {"local_j", e.local.sum_ue(k)},
                      {"offload_j", e.ue_offload.sum_ue(k)},
                      {"input_bits", cfg.ues[k].input_bits},
                      {"local_bits", s.tasks.local.sum_ue(k)},
                      {"offloaded_bits", s.tasks.ue_offload.sum_ue(k)},
                      {"uav_computed_bits", s.tasks.uav_compute.sum_ue(k)},
                      {"forwarded_bits", s.tasks.uav_offload.sum_ue(k)}});
  }
  json violations = json::array();
  for (const Violation& v : s.report.violations) {
    violations.push_back({{"constraint", v.constraint}, {"ue", v.ue}, {"slot", v.slot}, {"excess", v.excess}});
  }
  json j = {
      {"scheme", scheme},
      {"tec_j", e.tec},
      {"ue_energy_j", e.ue_total()},
      {"uav_energy_j", e.uav_total()},
      {"fly_energy_j", e.fly_total()},
      {"uav_compute_energy_j", e.uav_compute.sum()},
      {"uav_offload_energy_j", e.uav_offload.sum()},
      {"per_ue", per_ue},
      {"outer_iterations", s.report.outer_iterations},
      {"converged", s.report.converged},
      {"sca_iterations_last", s.report.sca_iterations},
      {"newton_steps", s.report.newton_steps},
      {"violations", violations},
      {"wall_time_s", s.report.wall_time},
      {"local_computing_includes_fly", kLocalComputingIncludesFly},
      {"config", config_to_json(cfg)},
  };
  if (cert) {
    j["residuals"] = {
        {"task_primal", cert->task.primal_residual},
        {"task_complementary_slackness", cert->task.complementary_slackness},
        {"task_stationarity", cert->task.stationarity},
        {"task_duality_gap_j", cert->task.duality_gap},
        {"bandwidth_stationarity", nullable(cert->bandwidth_stationarity)},
        {"bandwidth_split", nullable(cert->bandwidth_split_residual)},
        {"task_block_change", cert->task_block_change},
        {"bandwidth_block_change", cert->bandwidth_block_change},
    };
  }
  return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_run(const std::filesystem::path& dir, const std::string& scheme, const Solution& s,
               const ScenarioConfig& cfg, const BlockCertificates* cert) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(s.trajectory, cfg));
  write_file_atomic(dir / "energy.csv", energy_csv(s.report.energy, cfg));
  write_file_atomic(dir / "allocation.csv", allocation_csv(s.tasks, s.bandwidth));
  write_file_atomic(dir / "convergence.csv", convergence_csv(s.report));
  write_file_atomic(dir / "summary.json", summary_json(scheme, s, cfg, cert).dump(2) + "\n");
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  Trajectory u;
  for (const auto& r : read_csv(path, kTrajectoryHeader)) {
    if (r.size() != 4) throw std::runtime_error(path.string() + ": expected 4 columns");
    if (std::stoi(r[0]) != static_cast<int>(u.points.size())) {
      throw std::runtime_error(path.string() + ": rows out of order");
    }
    u.points.push_back({to_double(r[1]), to_double(r[2])});
  }
  return u;
}

std::pair<TaskAllocation, BandwidthAllocation> read_allocation_csv(const std::filesystem::path& path, int ues,
                                                                   int slots) {
  TaskAllocation l(ues, slots);
  BandwidthAllocation b(ues, slots);
  std::vector<char> seen(static_cast<std::size_t>(ues) * slots, 0);
  for (const auto& r : read_csv(path, kAllocationHeader)) {
    if (r.size() != 8) throw std::runtime_error(path.string() + ": expected 8 columns");
    const int k = std::stoi(r[0]) - 1;
    const int n = std::stoi(r[1]);
    if (k < 0 || k >= ues || n < 1 || n > slots) throw std::runtime_error(path.string() + ": index out of range");
    seen[static_cast<std::size_t>(k) * slots + n - 1] = 1;
    l.local(k, n) = to_double(r[2]);
    l.ue_offload(k, n) = to_double(r[3]);
    l.uav_compute(k, n) = to_double(r[4]);
    l.uav_offload(k, n) = to_double(r[5]);
    b.ue_link(k, n) = to_double(r[6]);
    b.uav_link(k, n) = to_double(r[7]);
  }
  for (char c : seen) {
    if (!c) throw std::runtime_error(path.string() + ": missing (k, n) rows");
  }
  return {std::move(l), std::move(b)};
}

}  // namespace uavmec
