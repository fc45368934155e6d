#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include <optional>

#include "uavmec/alternating.hpp"
#include "uavmec/baselines.hpp"
#include "uavmec/config.hpp"
#include "uavmec/lambert_w.hpp"
#include "uavmec/results_io.hpp"
#include "uavmec/sweep.hpp"

namespace py = pybind11;
using namespace uavmec;

namespace {

ScenarioConfig parse_config(const std::string& text) {
  return config_from_json(text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text));
}

py::array_t<double> grid_to_array(const SlotGrid& g) {
  py::array_t<double> a({g.ues(), g.slots()});
  auto m = a.mutable_unchecked<2>();
  for (int k = 0; k < g.ues(); ++k) {
    for (int n = 1; n <= g.slots(); ++n) m(k, n - 1) = g(k, n);
  }
  return a;
}

SlotGrid array_to_grid(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int K, int N,
                       const char* name) {
  if (a.ndim() != 2 || a.shape(0) != K || a.shape(1) != N) {
    throw py::value_error(std::string(name) + ": expected shape (K, N)");
  }
  SlotGrid g(K, N);
  auto r = a.unchecked<2>();
  for (int k = 0; k < K; ++k) {
    for (int n = 1; n <= N; ++n) g(k, n) = r(k, n - 1);
  }
  return g;
}

py::array_t<double> trajectory_to_array(const Trajectory& u) {
  py::array_t<double> a({static_cast<py::ssize_t>(u.points.size()), py::ssize_t{2}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < u.points.size(); ++i) {
    m(i, 0) = u.points[i].x;
    m(i, 1) = u.points[i].y;
  }
  return a;
}

Trajectory array_to_trajectory(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int N) {
  if (a.ndim() != 2 || a.shape(0) != N + 1 || a.shape(1) != 2) {
    throw py::value_error("trajectory: expected shape (N+1, 2)");
  }
  Trajectory u;
  auto r = a.unchecked<2>();
  for (int i = 0; i <= N; ++i) u.points.push_back({r(i, 0), r(i, 1)});
  return u;
}

struct Run {
  std::string scheme;
  ScenarioConfig cfg;
  Solution solution;
  std::optional<BlockCertificates> cert;  // proposed scheme only
};

Run run(const std::string& config_json, const std::string& scheme, std::optional<int> max_outer) {
  if (!is_known_scheme(scheme)) throw ConfigError("scheme", "unknown scheme \"" + scheme + "\"");
  Run r{scheme, parse_config(config_json), {}, {}};
  SolveOptions opts = SolveOptions::from_config(r.cfg);
  if (max_outer) opts.max_outer = *max_outer;
  {
    py::gil_scoped_release release;
    r.solution = run_scheme(scheme, r.cfg, opts);
    if (scheme == "proposed") r.cert = certify_blocks(r.solution, r.cfg, opts);
  }
  return r;
}

std::vector<py::tuple> violations_list(const std::vector<Violation>& vs) {
  std::vector<py::tuple> out;
  for (const Violation& v : vs) out.push_back(py::make_tuple(v.constraint, v.ue, v.slot, v.excess));
  return out;
}

}  // namespace

PYBIND11_MODULE(_uavmec, m) {
  m.doc() = "UAV relay energy minimizer: task split, bandwidth split and trajectory.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);

  m.def("lambert_w0", [](double x) { return lambert_w0(x).w; }, py::arg("x"),
        "Principal branch of the Lambert W function.");

  m.def("config_json", [](const std::string& text) { return config_to_json(parse_config(text)).dump(); },
        py::arg("config_json") = "", "Validated, fully expanded config as JSON text.");

  m.def("baseline_names", [] {
    std::vector<std::string> out;
    for (BaselineKind k : all_baselines()) out.emplace_back(to_string(k));
    return out;
  });

  py::class_<Run>(m, "Run")
      .def_readonly("scheme", &Run::scheme)
      .def_property_readonly("tec", [](const Run& r) { return r.solution.report.energy.tec; })
      .def_property_readonly("ue_energy", [](const Run& r) { return r.solution.report.energy.ue_total(); })
      .def_property_readonly("uav_energy", [](const Run& r) { return r.solution.report.energy.uav_total(); })
      .def_property_readonly("fly_energy", [](const Run& r) { return r.solution.report.energy.fly_total(); })
      .def_property_readonly("tec_trace", [](const Run& r) { return r.solution.report.tec_trace; })
      .def_property_readonly("outer_iterations", [](const Run& r) { return r.solution.report.outer_iterations; })
      .def_property_readonly("converged", [](const Run& r) { return r.solution.report.converged; })
      .def_property_readonly("violations", [](const Run& r) { return violations_list(r.solution.report.violations); })
      .def_property_readonly("trajectory", [](const Run& r) { return trajectory_to_array(r.solution.trajectory); })
      .def_property_readonly("local", [](const Run& r) { return grid_to_array(r.solution.tasks.local); })
      .def_property_readonly("ue_offload", [](const Run& r) { return grid_to_array(r.solution.tasks.ue_offload); })
      .def_property_readonly("uav_compute", [](const Run& r) { return grid_to_array(r.solution.tasks.uav_compute); })
      .def_property_readonly("uav_offload", [](const Run& r) { return grid_to_array(r.solution.tasks.uav_offload); })
      .def_property_readonly("ue_link", [](const Run& r) { return grid_to_array(r.solution.bandwidth.ue_link); })
      .def_property_readonly("uav_link", [](const Run& r) { return grid_to_array(r.solution.bandwidth.uav_link); })
      .def("summary_json", [](const Run& r) { return summary_json(r.scheme, r.solution, r.cfg, r.cert ? &*r.cert : nullptr).dump(); })
      .def("write", [](const Run& r, const std::string& dir) { write_run(dir, r.scheme, r.solution, r.cfg, r.cert ? &*r.cert : nullptr); },
           py::arg("out_dir"));

  m.def("run", &run, py::arg("config_json") = "", py::arg("scheme") = "proposed",
        py::arg("max_outer") = py::none(), "Solve one scheme (proposed or a baseline name).");

  m.def(
      "check_feasibility",
      [](const std::string& config_json, py::array_t<double, py::array::c_style | py::array::forcecast> local,
         py::array_t<double, py::array::c_style | py::array::forcecast> ue_offload,
         py::array_t<double, py::array::c_style | py::array::forcecast> uav_compute,
         py::array_t<double, py::array::c_style | py::array::forcecast> uav_offload,
         py::array_t<double, py::array::c_style | py::array::forcecast> ue_link,
         py::array_t<double, py::array::c_style | py::array::forcecast> uav_link,
         py::array_t<double, py::array::c_style | py::array::forcecast> trajectory) {
        const ScenarioConfig cfg = parse_config(config_json);
        const int K = cfg.ue_count();
        const int N = cfg.slots;
        TaskAllocation l;
        l.local = array_to_grid(local, K, N, "local");
        l.ue_offload = array_to_grid(ue_offload, K, N, "ue_offload");
        l.uav_compute = array_to_grid(uav_compute, K, N, "uav_compute");
        l.uav_offload = array_to_grid(uav_offload, K, N, "uav_offload");
        BandwidthAllocation b;
        b.ue_link = array_to_grid(ue_link, K, N, "ue_link");
        b.uav_link = array_to_grid(uav_link, K, N, "uav_link");
        const Trajectory u = array_to_trajectory(trajectory, N);
        return py::make_tuple(total_energy(l, b, u, cfg).tec, violations_list(check_feasibility(l, b, u, cfg)));
      },
      py::arg("config_json"), py::arg("local"), py::arg("ue_offload"), py::arg("uav_compute"),
      py::arg("uav_offload"), py::arg("ue_link"), py::arg("uav_link"), py::arg("trajectory"),
      "Returns (tec, violations) for an explicit allocation and trajectory.");
}
