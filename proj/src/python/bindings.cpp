#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "beliefroute/config.hpp"
#include "beliefroute/ekf.hpp"
#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/map_env.hpp"
#include "beliefroute/pipeline.hpp"
#include "beliefroute/planner.hpp"
#include "beliefroute/roadmap.hpp"

namespace py = pybind11;
namespace br = beliefroute;

namespace {

// JSON crosses the boundary as Python objects via the json module.
py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

nlohmann::json from_python(const py::object& obj) {
  const auto text =
      py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

std::vector<std::size_t> node_indices(const std::vector<br::NodeId>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(br::index(id));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Belief-space coverage circuit planning (C++ core)";

  py::enum_<br::ErrorCategory>(m, "ErrorCategory")
      .value("CONFIG", br::ErrorCategory::kConfig)
      .value("MAP", br::ErrorCategory::kMap)
      .value("PLANNER", br::ErrorCategory::kPlanner)
      .value("ESTIMATION", br::ErrorCategory::kEstimation)
      .value("SIMULATION", br::ErrorCategory::kSimulation)
      .value("ARTIFACT", br::ErrorCategory::kArtifact);

  // Error subclasses RuntimeError and carries a `category` attribute. The type
  // object is intentionally never released.
  static PyObject* error_type =
      PyErr_NewException("beliefroute._core.Error", PyExc_RuntimeError, nullptr);
  m.add_object("Error", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const br::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("category") = py::cast(e.category());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // Map
  py::class_<br::EnvironmentMap>(m, "EnvironmentMap")
      .def_property_readonly("bounds_min", &br::EnvironmentMap::bounds_min)
      .def_property_readonly("bounds_max", &br::EnvironmentMap::bounds_max)
      .def_property_readonly("obstacle_count",
                             [](const br::EnvironmentMap& map) {
                               return map.obstacles().size();
                             })
      .def("deploy_position", &br::EnvironmentMap::deploy_position)
      .def("is_free", &br::EnvironmentMap::is_free, py::arg("p"))
      .def("segment_is_free", &br::EnvironmentMap::segment_is_free,
           py::arg("a"), py::arg("b"))
      .def("line_of_sight", &br::EnvironmentMap::line_of_sight, py::arg("a"),
           py::arg("b"))
      .def("camera_sees", &br::EnvironmentMap::camera_sees, py::arg("uav"))
      .def("lidar_sees", &br::EnvironmentMap::lidar_sees, py::arg("uav"))
      .def("to_dict",
           [](const br::EnvironmentMap& map) { return to_python(br::map_to_json(map)); });
  m.def("load_map", &br::load_map, py::arg("path"));
  m.def("parse_map",
        [](const py::object& doc) { return br::parse_map(from_python(doc)); },
        py::arg("doc"));

  // Roadmap and circuits
  py::class_<br::RoadmapGraph>(m, "RoadmapGraph")
      .def_property_readonly("nodes",
                             [](const br::RoadmapGraph& g) { return g.nodes; })
      .def_property_readonly("edges",
                             [](const br::RoadmapGraph& g) {
                               std::vector<std::tuple<std::size_t, std::size_t, double, int>> out;
                               for (const auto& e : g.edges) {
                                 out.emplace_back(br::index(e.a), br::index(e.b),
                                                  e.length, e.multiplicity);
                               }
                               return out;
                             })
      .def_property_readonly("source",
                             [](const br::RoadmapGraph& g) { return br::index(g.source); })
      .def("degrees", &br::RoadmapGraph::degrees)
      .def("total_length", &br::RoadmapGraph::total_length)
      .def("edge_instance_count", &br::RoadmapGraph::edge_instance_count)
      .def("is_connected", &br::RoadmapGraph::is_connected)
      .def("to_dict",
           [](const br::RoadmapGraph& g) { return to_python(br::graph_to_json(g)); });

  m.def(
      "sample_nodes",
      [](const br::EnvironmentMap& map, std::size_t n, std::uint64_t seed,
         double forward_bias, std::size_t attempt_budget) {
        br::Rng rng(br::derive_seed(seed, br::kStreamNodes, 0));
        return br::sample_nodes(map, n, {forward_bias, attempt_budget}, rng);
      },
      py::arg("map"), py::arg("n"), py::arg("seed"), py::arg("forward_bias") = 3.0,
      py::arg("attempt_budget") = 10000);
  m.def("connect_knn", &br::connect_knn, py::arg("nodes"), py::arg("k"),
        py::arg("map"));
  m.def("eulerize", &br::eulerize, py::arg("graph"), py::arg("map"));

  py::class_<br::Circuit>(m, "Circuit")
      .def_readonly("run_index", &br::Circuit::run_index)
      .def_property_readonly("nodes",
                             [](const br::Circuit& c) { return node_indices(c.nodes); })
      .def_readonly("length", &br::Circuit::length)
      .def_readonly("flight_time", &br::Circuit::flight_time)
      .def_readonly("duplicate", &br::Circuit::duplicate);
  m.def(
      "random_euler_circuit",
      [](const br::RoadmapGraph& g, std::uint64_t seed, double cruise) {
        br::Rng rng(seed);
        return br::random_euler_circuit(g, rng, cruise);
      },
      py::arg("graph"), py::arg("seed"), py::arg("cruise") = 0.5);
  m.def("generate_candidates", &br::generate_candidates, py::arg("graph"),
        py::arg("count"), py::arg("seed"), py::arg("cruise") = 0.5);
  m.def("filter_by_flight_time", &br::filter_by_flight_time,
        py::arg("circuits"), py::arg("rho"), py::arg("cruise") = 0.5);
  m.def("validate_circuit", &br::validate_circuit, py::arg("circuit"),
        py::arg("graph"));

  // Filter
  py::class_<br::Attitude>(m, "Attitude")
      .def(py::init<>())
      .def(py::init([](double pitch, double roll) { return br::Attitude{pitch, roll}; }),
           py::arg("pitch"), py::arg("roll"))
      .def_readwrite("pitch", &br::Attitude::pitch)
      .def_readwrite("roll", &br::Attitude::roll);

  py::class_<br::NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("Q", &br::NoiseConfig::Q)
      .def_readwrite("r_alt", &br::NoiseConfig::r_alt)
      .def_readwrite("r_uwb", &br::NoiseConfig::r_uwb)
      .def_readwrite("R_cam", &br::NoiseConfig::R_cam)
      .def_readwrite("R_lidar", &br::NoiseConfig::R_lidar)
      .def_readwrite("ts", &br::NoiseConfig::ts)
      .def("gamma", [](const br::NoiseConfig& n, double range) {
        return n.gamma_model.gamma(range);
      })
      .def("validate", &br::NoiseConfig::validate);

  py::class_<br::BeliefState>(m, "BeliefState")
      .def(py::init<>())
      .def_readwrite("x_hat", &br::BeliefState::x_hat)
      .def_readwrite("P", &br::BeliefState::P)
      .def_readwrite("t", &br::BeliefState::t)
      .def_property("position", &br::BeliefState::position,
                    &br::BeliefState::set_position)
      .def_property("velocity", &br::BeliefState::velocity,
                    &br::BeliefState::set_velocity);
  m.def("initial_belief", &br::initial_belief, py::arg("position"));
  m.def("predict", &br::predict, py::arg("belief"), py::arg("noise"));
  m.def("altimeter_update", &br::altimeter_update, py::arg("belief"),
        py::arg("z"), py::arg("attitude"), py::arg("noise"));
  m.def("uwb_update", &br::uwb_update, py::arg("belief"), py::arg("z"),
        py::arg("noise"));
  m.def("camera_update", &br::camera_update, py::arg("belief"), py::arg("z"),
        py::arg("noise"));
  m.def("lidar_update", &br::lidar_update, py::arg("belief"), py::arg("z"),
        py::arg("gamma"), py::arg("noise"));
  m.def("pec",
        [](const br::Covariance& P, const std::string& norm) {
          return br::pec(P, norm == "frobenius" ? br::PecNorm::kFrobenius
                                                : br::PecNorm::kSpectral);
        },
        py::arg("P"), py::arg("norm") = "spectral");

  // Configuration and pipeline
  py::class_<br::RunConfig>(m, "RunConfig")
      .def_readwrite("seed", &br::RunConfig::seed)
      .def_readwrite("nodes", &br::RunConfig::nodes)
      .def_readwrite("knn", &br::RunConfig::knn)
      .def_readwrite("candidates", &br::RunConfig::candidates)
      .def_readwrite("cruise", &br::RunConfig::cruise)
      .def_readwrite("rho", &br::RunConfig::rho)
      .def_readwrite("delta", &br::RunConfig::delta)
      .def_readwrite("mc_runs", &br::RunConfig::mc_runs)
      .def_readwrite("threads", &br::RunConfig::threads)
      .def_readwrite("map_path", &br::RunConfig::map_path)
      .def_readwrite("output_dir", &br::RunConfig::output_dir)
      .def("to_dict",
           [](const br::RunConfig& c) { return to_python(br::config_to_json(c)); });
  m.def("load_config", &br::load_config, py::arg("path"),
        py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "plan",
      [](const br::RunConfig& cfg) {
        const auto result = br::cmd_plan(cfg);
        py::dict out;
        out["best"] = result.ranking.best;
        out["worst"] = result.ranking.worst;
        out["second_best"] = result.ranking.second_best;
        out["second_worst"] = result.ranking.second_worst;
        out["degenerate"] = result.ranking.degenerate;
        py::dict totals;
        for (const auto& s : result.scores) totals[py::int_(s.circuit_index)] = s.total;
        out["totals"] = totals;
        out["candidates"] = result.candidates.size();
        return out;
      },
      py::arg("config"), "Runs the planning stage and writes its artifacts.");
  m.def(
      "simulate",
      [](const br::RunConfig& cfg, const std::string& selection,
         const std::string& mode) {
        const auto set = br::cmd_simulate(cfg, selection, br::parse_mode(mode));
        py::dict out;
        out["label"] = set.label;
        out["circuit"] = set.circuit_index;
        out["nominal_flight_time"] = set.nominal_flight_time;
        py::list rms;
        for (const auto& s : set.stats) rms.append(s.rms_3d);
        out["rms_3d"] = rms;
        out["mean_rms_3d"] = set.aggregate.mean.rms_3d;
        return out;
      },
      py::arg("config"), py::arg("selection") = "best", py::arg("mode") = "noisy",
      "Runs Monte Carlo trials of a planned circuit and writes their artifacts.");
  m.def(
      "report",
      [](const std::filesystem::path& dir) { return to_python(br::cmd_report(dir)); },
      py::arg("output_dir"));
}
